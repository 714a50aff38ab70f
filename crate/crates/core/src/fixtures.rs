//! Example utterances from the original write-up, annotated by hand.
//!
//! These are fixed test fixtures; the synthetic generator never emits them.

use crate::annotation::{utterance, AnnotatedUtterance};

fn build(
    id: &str,
    domain: &str,
    text: &str,
    slots: &[(&str, usize, usize)],
    relations: &[(usize, usize, &str)],
) -> AnnotatedUtterance {
    utterance(id, domain, text, slots, relations).expect("fixture is well formed")
}

/// "Give me three large burgers and two fries."
pub fn food_burgers() -> AnnotatedUtterance {
    build(
        "fixture-food-1",
        "food",
        "Give me three large burgers and two fries.",
        &[("quantity", 2, 3), ("size", 3, 4), ("plus", 4, 5), ("quantity", 6, 7), ("plus", 7, 8)],
        &[(0, 2, "numeric"), (1, 2, "size"), (3, 4, "numeric")],
    )
}

/// Burrito bowl with toppings; every topping attaches to the bowl.
pub fn food_burrito_bowl() -> AnnotatedUtterance {
    build(
        "fixture-food-2",
        "food",
        "Can I get a burrito bowl with brown rice and black beans, extra chicken and no tomatoes?",
        &[("plus", 4, 6), ("plus", 7, 9), ("plus", 10, 12), ("plus", 14, 15), ("minus", 17, 18)],
        &[(0, 1, "add_topping"), (0, 2, "add_topping"), (0, 3, "add_topping"), (0, 4, "remove_topping")],
    )
}

/// Shared enchantment: fire swords and fire shields.
pub fn gaming_shared() -> AnnotatedUtterance {
    build(
        "fixture-gaming-1",
        "gaming",
        "I'd like to see your fire swords and shields.",
        &[("enchantment", 7, 8), ("item", 8, 9), ("item", 10, 11)],
        &[(0, 1, "enchantment"), (0, 2, "enchantment")],
    )
}

/// Unshared enchantment: fire swords and any shield.
pub fn gaming_unshared() -> AnnotatedUtterance {
    build(
        "fixture-gaming-2",
        "gaming",
        "I'd like to see your fire swords and a shield.",
        &[("enchantment", 7, 8), ("item", 8, 9), ("item", 11, 12)],
        &[(0, 1, "enchantment")],
    )
}

/// Sector, inside and outside locations in the contextual slot scheme.
pub fn stocks_healthcare_slot_based() -> AnnotatedUtterance {
    build(
        "fixture-stocks-1",
        "stocks_slot_based",
        "Show me all the healthcare companies in Europe outside of Germany.",
        &[("sector", 4, 5), ("location_inside", 7, 8), ("location_outside", 10, 11)],
        &[],
    )
}

/// "Show me all the companies in Europe outside of Germany." in both schemes:
/// `(relation_based, slot_based)`.
pub fn stocks_europe() -> (AnnotatedUtterance, AnnotatedUtterance) {
    let text = "Show me all the companies in Europe outside of Germany.";
    (
        build(
            "fixture-stocks-2",
            "stocks",
            text,
            &[("location", 6, 7), ("negation_modifier", 7, 8), ("location", 9, 10)],
            &[(1, 2, "negation_relation")],
        ),
        build(
            "fixture-stocks-2",
            "stocks_slot_based",
            text,
            &[("location_inside", 6, 7), ("location_outside", 9, 10)],
            &[],
        ),
    )
}

/// Query metric plus two filters, in both schemes.
pub fn stocks_ebitda() -> (AnnotatedUtterance, AnnotatedUtterance) {
    let text = "Show me the EBITDA of companies that have a market cap over a million dollars and revenue less than 2 million?";
    (
        build(
            "fixture-stocks-3",
            "stocks",
            text,
            &[
                ("metric_name", 3, 4),
                ("metric_name", 9, 11),
                ("filter_modifier", 11, 12),
                ("amount", 13, 14),
                ("metric_name", 16, 17),
                ("filter_modifier", 17, 18),
                ("amount", 19, 21),
            ],
            &[
                (1, 2, "filter_metric_relation"),
                (2, 3, "filter_amount_relation"),
                (4, 5, "filter_metric_relation"),
                (5, 6, "filter_amount_relation"),
            ],
        ),
        build(
            "fixture-stocks-3",
            "stocks_slot_based",
            text,
            &[
                ("query_metric", 3, 4),
                ("filter_metric", 9, 11),
                ("filter_amount_above", 13, 14),
                ("filter_metric", 16, 17),
                ("filter_amount_below", 19, 21),
            ],
            &[],
        ),
    )
}

/// Dated filters, in both schemes.
pub fn stocks_dated_filters() -> (AnnotatedUtterance, AnnotatedUtterance) {
    let text = "Which companies have a 2018 market cap over a million dollars and 2019 revenue less than 2 million?";
    (
        build(
            "fixture-stocks-4",
            "stocks",
            text,
            &[
                ("date_metric", 4, 5),
                ("metric_name", 5, 7),
                ("filter_modifier", 7, 8),
                ("amount", 9, 10),
                ("date_metric", 12, 13),
                ("metric_name", 13, 14),
                ("filter_modifier", 14, 15),
                ("amount", 16, 18),
            ],
            &[
                (0, 1, "date_relation"),
                (1, 2, "filter_metric_relation"),
                (2, 3, "filter_amount_relation"),
                (4, 5, "date_relation"),
                (5, 6, "filter_metric_relation"),
                (6, 7, "filter_amount_relation"),
            ],
        ),
        build(
            "fixture-stocks-4",
            "stocks_slot_based",
            text,
            &[
                ("date", 4, 5),
                ("filter_metric", 5, 7),
                ("filter_amount_above", 9, 10),
                ("date", 12, 13),
                ("filter_metric", 13, 14),
                ("filter_amount_below", 16, 18),
            ],
            &[],
        ),
    )
}
