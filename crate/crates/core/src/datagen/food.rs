use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::builder::{article, chance, connective, describe, ending, pick, Builder, Draft};

/// `(singular, plural, takes toppings)`
const ITEMS: &[(&str, &str, bool)] = &[
    ("burger", "burgers", true),
    ("cheeseburger", "cheeseburgers", true),
    ("pizza", "pizzas", true),
    ("burrito bowl", "burrito bowls", true),
    ("burrito", "burritos", true),
    ("taco", "tacos", true),
    ("sandwich", "sandwiches", true),
    ("salad", "salads", true),
    ("hot dog", "hot dogs", true),
    ("wrap", "wraps", true),
    ("quesadilla", "quesadillas", true),
    ("sub", "subs", true),
    ("fries", "fries", false),
    ("onion rings", "onion rings", false),
    ("coke", "cokes", false),
    ("sprite", "sprites", false),
    ("milkshake", "milkshakes", false),
    ("lemonade", "lemonades", false),
    ("coffee", "coffees", false),
    ("iced tea", "iced teas", false),
    ("cookie", "cookies", false),
    ("brownie", "brownies", false),
];
const QUANTITIES: &[&str] = &["two", "three", "four", "five", "six", "seven", "eight", "ten", "twelve", "one"];
const SIZES: &[&str] = &["small", "medium", "large", "extra large", "regular", "kids", "jumbo", "double", "mini", "family size"];
const TOPPINGS: &[&str] = &[
    "cheese", "bacon", "onions", "pickles", "lettuce", "tomatoes", "jalapenos", "mushrooms", "olives", "pepperoni",
    "brown rice", "black beans", "chicken", "guacamole", "sour cream", "salsa", "avocado", "ketchup", "mustard", "mayo",
];
const REMOVERS: &[&str] = &["without", "no", "with no"];
const CLAUSE_REMOVERS: &[&str] = &["and no", "but no", "without", "but without", "and hold the"];
/// `(prefix, suffix, question)`
const CARRIERS: &[(&str, &str, bool)] = &[
    ("give me", "", false),
    ("can i get", "", true),
    ("i'd like", "", false),
    ("i want", "", false),
    ("could i have", "", true),
    ("let me get", "", false),
    ("i'll have", "", false),
    ("can i order", "", true),
    ("i'd like to order", "", false),
    ("", "please", false),
    ("get me", "", false),
];

struct Item {
    noun: usize,
    quantity: Option<usize>,
    size: Option<usize>,
    remove: Option<usize>,
    toppings: Vec<usize>,
    clause_remove: Option<usize>,
}

impl Item {
    fn slots(&self) -> usize {
        1 + self.quantity.is_some() as usize
            + self.size.is_some() as usize
            + self.remove.is_some() as usize
            + self.toppings.len()
            + self.clause_remove.is_some() as usize
    }
}

fn plan(rng: &mut ChaCha8Rng) -> Vec<Item> {
    let k = match rng.gen_range(0..10) {
        0..=3 => 1,
        4..=7 => 2,
        _ => 3,
    };
    let mut items = Vec::with_capacity(k);
    for i in 0..k {
        let noun = rng.gen_range(0..ITEMS.len());
        let main = ITEMS[noun].2;
        let last = i + 1 == k;
        let mut item = Item {
            noun,
            quantity: chance(rng, 0.5).then(|| rng.gen_range(0..QUANTITIES.len())),
            size: chance(rng, 0.4).then(|| rng.gen_range(0..SIZES.len())),
            remove: None,
            toppings: Vec::new(),
            clause_remove: None,
        };
        if main && last && chance(rng, 0.4) {
            let t = rng.gen_range(1..=3);
            while item.toppings.len() < t {
                let x = rng.gen_range(0..TOPPINGS.len());
                if !item.toppings.contains(&x) {
                    item.toppings.push(x);
                }
            }
            if chance(rng, 0.35) {
                let x = rng.gen_range(0..TOPPINGS.len());
                if !item.toppings.contains(&x) {
                    item.clause_remove = Some(x);
                }
            }
        } else if main && chance(rng, 0.25) {
            item.remove = Some(rng.gen_range(0..TOPPINGS.len()));
        }
        items.push(item);
    }
    items
}

pub(crate) fn draft(rng: &mut ChaCha8Rng, n: usize) -> Option<Draft> {
    let items = (0..200)
        .map(|_| plan(rng))
        .find(|items| items.iter().map(Item::slots).sum::<usize>() == n)?;
    let &(prefix, suffix, question) = pick(rng, CARRIERS);
    let mut b = Builder::new();
    b.words(prefix);
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            b.words(connective(i, items.len()));
        }
        let (sing, plural, _) = ITEMS[item.noun];
        let q = item.quantity.map(|q| QUANTITIES[q]);
        let noun = if q.is_none() || q == Some("one") { sing } else { plural };
        let q = q.map(|q| b.slot("quantity", q));
        if q.is_none() {
            let next = item.size.map_or(noun, |s| SIZES[s]);
            b.words(if sing == plural { "some" } else { article(next) });
        }
        let s = item.size.map(|s| b.slot("size", SIZES[s]));
        let head = b.slot("plus", noun);
        if let Some(q) = q {
            b.rel(q, head, "numeric");
        }
        if let Some(s) = s {
            b.rel(s, head, "size");
        }
        if let Some(r) = item.remove {
            b.words(pick(rng, REMOVERS));
            let m = b.slot("minus", TOPPINGS[r]);
            b.rel(head, m, "remove_topping");
        }
        if !item.toppings.is_empty() {
            b.words("with");
            for (j, &t) in item.toppings.iter().enumerate() {
                if j > 0 {
                    b.words(connective(j, item.toppings.len()));
                }
                let p = b.slot("plus", TOPPINGS[t]);
                b.rel(head, p, "add_topping");
            }
            if let Some(r) = item.clause_remove {
                b.words(pick(rng, CLAUSE_REMOVERS));
                let m = b.slot("minus", TOPPINGS[r]);
                b.rel(head, m, "remove_topping");
            }
        }
    }
    b.words(suffix);
    debug_assert_eq!(b.slot_count(), n);
    Some(b.finish("order_food", ending(rng, question), false))
}

pub(crate) fn inventory() -> String {
    let items: Vec<&str> = ITEMS.iter().flat_map(|(s, p, _)| [*s, *p]).collect();
    let carriers: Vec<&str> = CARRIERS.iter().flat_map(|(p, s, _)| [*p, *s]).collect();
    let mut out = String::new();
    out.push_str(&describe("food.items", &items));
    out.push_str(&describe("food.quantity", QUANTITIES));
    out.push_str(&describe("food.size", SIZES));
    out.push_str(&describe("food.toppings", TOPPINGS));
    out.push_str(&describe("food.removers", REMOVERS));
    out.push_str(&describe("food.clause_removers", CLAUSE_REMOVERS));
    out.push_str(&describe("food.carriers", &carriers));
    out
}
