use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::builder::{article, chance, connective, describe, ending, pick, Builder, Draft};

const ITEMS: &[(&str, &str)] = &[
    ("sword", "swords"),
    ("shield", "shields"),
    ("bow", "bows"),
    ("axe", "axes"),
    ("dagger", "daggers"),
    ("helmet", "helmets"),
    ("staff", "staves"),
    ("spear", "spears"),
    ("mace", "maces"),
    ("crossbow", "crossbows"),
    ("hammer", "hammers"),
    ("amulet", "amulets"),
    ("ring", "rings"),
    ("wand", "wands"),
    ("lance", "lances"),
];
const MONSTERS: &[(&str, &str)] = &[
    ("dragon", "dragons"),
    ("troll", "trolls"),
    ("goblin", "goblins"),
    ("orc", "orcs"),
    ("skeleton", "skeletons"),
    ("wraith", "wraiths"),
    ("spider", "spiders"),
    ("wolf", "wolves"),
    ("golem", "golems"),
    ("harpy", "harpies"),
    ("ogre", "ogres"),
    ("zombie", "zombies"),
    ("bat", "bats"),
    ("serpent", "serpents"),
    ("wyvern", "wyverns"),
];
const ENCHANTMENTS: &[&str] = &[
    "fire", "ice", "frost", "poison", "holy", "shadow", "lightning", "arcane", "vampiric", "cursed", "blessed", "storm",
    "venom", "flaming", "thunder",
];
const SIZES: &[&str] = &["small", "large", "heavy", "light", "tiny", "huge", "two-handed", "long", "short", "giant", "great"];
const AMOUNTS: &[&str] = &["10", "20", "25", "50", "75", "100", "150", "200", "250", "500", "1000"];
const CURRENCIES: &[&str] = &["gold", "coins", "gems", "silver"];
const COST_LEADS: &[&str] = &["for", "under", "for about", "at"];
const MAPS: &[&str] = &[
    "swamp", "frost caverns", "dark forest", "desert", "castle", "mines", "sunken temple", "volcano", "crypt",
    "mountains", "tundra", "ruins", "jungle", "catacombs",
];
const MAP_LEADS: &[&str] = &["in the", "near the", "around the", "inside the"];
const SHOP_CARRIERS: &[(&str, bool)] = &[
    ("show me your", false),
    ("i'd like to see your", false),
    ("do you sell", true),
    ("i want to buy", false),
    ("i'm looking for", false),
    ("do you have", true),
    ("how much for", true),
    ("i need", false),
];
const HUNT_CARRIERS: &[(&str, bool)] = &[
    ("where can i find", true),
    ("i want to hunt", false),
    ("show me", false),
    ("where do i find", true),
    ("are there", true),
    ("i'm hunting", false),
    ("i'm tracking", false),
];

struct Ware {
    noun: usize,
    plural: bool,
    size: Option<usize>,
    enchantment: Option<usize>,
    cost: Option<(usize, usize, usize)>,
}

impl Ware {
    fn bare_plural(&self) -> bool {
        self.plural && self.size.is_none() && self.enchantment.is_none() && self.cost.is_none()
    }
}

fn plan_shop(rng: &mut ChaCha8Rng) -> Vec<Ware> {
    let k = match rng.gen_range(0..10) {
        0..=4 => 1,
        5..=8 => 2,
        _ => 3,
    };
    let mut taken = Vec::new();
    (0..k)
        .map(|_| Ware {
            noun: distinct(rng, &mut taken, ITEMS.len()),
            plural: chance(rng, 0.6),
            size: chance(rng, 0.3).then(|| rng.gen_range(0..SIZES.len())),
            enchantment: chance(rng, 0.45).then(|| rng.gen_range(0..ENCHANTMENTS.len())),
            cost: chance(rng, 0.3).then(|| {
                (
                    rng.gen_range(0..AMOUNTS.len()),
                    rng.gen_range(0..CURRENCIES.len()),
                    rng.gen_range(0..COST_LEADS.len()),
                )
            }),
        })
        .collect()
}

fn shop_slots(wares: &[Ware]) -> usize {
    wares
        .iter()
        .map(|w| 1 + w.size.is_some() as usize + w.enchantment.is_some() as usize + w.cost.is_some() as usize)
        .sum()
}

fn shop(rng: &mut ChaCha8Rng, n: usize) -> Option<Draft> {
    let wares = (0..200).map(|_| plan_shop(rng)).find(|w| shop_slots(w) == n)?;
    let &(carrier, question) = pick(rng, SHOP_CARRIERS);
    let mut b = Builder::new();
    match carrier.strip_suffix(" your") {
        Some(bare) if !wares[0].plural => b.words(bare),
        _ => b.words(carrier),
    };
    let mut shared: Option<usize> = None;
    for (i, w) in wares.iter().enumerate() {
        if i > 0 {
            b.words(connective(i, wares.len()));
        }
        let (sing, plural) = ITEMS[w.noun];
        let noun = if w.plural { plural } else { sing };
        if !w.plural {
            let next = w
                .size
                .map(|s| SIZES[s])
                .or(w.enchantment.map(|e| ENCHANTMENTS[e]))
                .unwrap_or(noun);
            b.words(article(next));
        }
        let size = w.size.map(|s| b.slot("size", SIZES[s]));
        let ench = w.enchantment.map(|e| b.slot("enchantment", ENCHANTMENTS[e]));
        let head = b.slot("item", noun);
        if let Some(s) = size {
            b.rel(s, head, "size");
        }
        match ench {
            Some(e) => {
                b.rel(e, head, "enchantment");
                shared = w.plural.then_some(e);
            }
            None if i > 0 && w.bare_plural() => {
                if let Some(e) = shared {
                    b.rel(e, head, "enchantment");
                }
            }
            None => shared = None,
        }
        if let Some((amount, currency, lead)) = w.cost {
            b.words(COST_LEADS[lead]);
            let c = b.slot("cost", &format!("{} {}", AMOUNTS[amount], CURRENCIES[currency]));
            b.rel(c, head, "cost");
            shared = None;
        }
    }
    Some(b.finish("shop_items", ending(rng, question), false))
}

struct Beast {
    noun: usize,
    plural: bool,
    enchantment: Option<usize>,
}

struct Group {
    beasts: Vec<Beast>,
    map: Option<(usize, usize)>,
}

fn distinct(rng: &mut ChaCha8Rng, taken: &mut Vec<usize>, len: usize) -> usize {
    loop {
        let x = rng.gen_range(0..len);
        if !taken.contains(&x) {
            taken.push(x);
            return x;
        }
    }
}

fn plan_hunt(rng: &mut ChaCha8Rng) -> Vec<Group> {
    let groups = if chance(rng, 0.2) { 2 } else { 1 };
    let mut taken = Vec::new();
    (0..groups)
        .map(|g| {
            let k = if chance(rng, 0.5) { 1 } else { rng.gen_range(2..=3) };
            let beasts = (0..k)
                .map(|_| Beast {
                    noun: distinct(rng, &mut taken, MONSTERS.len()),
                    plural: chance(rng, 0.7),
                    enchantment: chance(rng, 0.5).then(|| rng.gen_range(0..ENCHANTMENTS.len())),
                })
                .collect();
            let map = (groups == 2 || g == 0 && chance(rng, 0.5))
                .then(|| (rng.gen_range(0..MAPS.len()), rng.gen_range(0..MAP_LEADS.len())));
            Group { beasts, map }
        })
        .collect()
}

fn hunt_slots(groups: &[Group]) -> usize {
    groups
        .iter()
        .map(|g| g.map.is_some() as usize + g.beasts.iter().map(|b| 1 + b.enchantment.is_some() as usize).sum::<usize>())
        .sum()
}

fn hunt(rng: &mut ChaCha8Rng, n: usize) -> Option<Draft> {
    let groups = (0..200).map(|_| plan_hunt(rng)).find(|p| hunt_slots(p) == n)?;
    let &(carrier, question) = pick(rng, HUNT_CARRIERS);
    let mut b = Builder::new();
    b.words(carrier);
    for (g, group) in groups.iter().enumerate() {
        if g > 0 {
            b.words("and");
        }
        let mut heads = Vec::new();
        let mut shared: Option<usize> = None;
        for (j, beast) in group.beasts.iter().enumerate() {
            if j > 0 {
                b.words(connective(j, group.beasts.len()));
            }
            let (sing, pl) = MONSTERS[beast.noun];
            let noun = if beast.plural { pl } else { sing };
            if !beast.plural {
                b.words(article(beast.enchantment.map_or(noun, |e| ENCHANTMENTS[e])));
            }
            let ench = beast.enchantment.map(|e| b.slot("enchantment", ENCHANTMENTS[e]));
            let head = b.slot("monster", noun);
            match ench {
                Some(e) => {
                    b.rel(e, head, "enchantment");
                    shared = beast.plural.then_some(e);
                }
                None if j > 0 && beast.plural => {
                    if let Some(e) = shared {
                        b.rel(e, head, "enchantment");
                    }
                }
                None => shared = None,
            }
            heads.push(head);
        }
        if let Some((map, lead)) = group.map {
            b.words(MAP_LEADS[lead]);
            let place = b.slot("map", MAPS[map]);
            for h in heads {
                b.rel(h, place, "location");
            }
        }
    }
    Some(b.finish("find_monsters", ending(rng, question), false))
}

pub(crate) fn draft(rng: &mut ChaCha8Rng, n: usize) -> Option<Draft> {
    if chance(rng, 0.45) {
        shop(rng, n)
    } else {
        hunt(rng, n)
    }
}

pub(crate) fn inventory() -> String {
    let items: Vec<&str> = ITEMS.iter().flat_map(|(s, p)| [*s, *p]).collect();
    let monsters: Vec<&str> = MONSTERS.iter().flat_map(|(s, p)| [*s, *p]).collect();
    let shop: Vec<&str> = SHOP_CARRIERS.iter().map(|c| c.0).collect();
    let hunt: Vec<&str> = HUNT_CARRIERS.iter().map(|c| c.0).collect();
    let mut out = String::new();
    out.push_str(&describe("gaming.items", &items));
    out.push_str(&describe("gaming.monsters", &monsters));
    out.push_str(&describe("gaming.enchantment", ENCHANTMENTS));
    out.push_str(&describe("gaming.size", SIZES));
    out.push_str(&describe("gaming.cost_amounts", AMOUNTS));
    out.push_str(&describe("gaming.currencies", CURRENCIES));
    out.push_str(&describe("gaming.cost_leads", COST_LEADS));
    out.push_str(&describe("gaming.map", MAPS));
    out.push_str(&describe("gaming.map_leads", MAP_LEADS));
    out.push_str(&describe("gaming.shop_carriers", &shop));
    out.push_str(&describe("gaming.hunt_carriers", &hunt));
    out
}
