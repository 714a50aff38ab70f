use alloc::string::ToString;

use super::{ensure_known, RelationAssignment, RelexError};
use crate::annotation::{SlotPair, SlotSpan};
use crate::schema::DomainSchema;

/// Rule-based extraction.
///
/// Each slot whose label is a configured modifier looks for valid modified
/// slots; a single candidate gets the configured relation, several
/// candidates resolve to the nearest one. Distance is the number of tokens
/// strictly between the spans and an equidistant tie goes to the candidate
/// after the modifier. Output depends only on labels and positions.
pub fn heuristic_extract(slots: &[SlotSpan], schema: &DomainSchema) -> Result<RelationAssignment, RelexError> {
    ensure_known(slots, schema)?;
    let mut out = RelationAssignment::all_none(slots.len());
    for (xi, x) in slots.iter().enumerate() {
        let Some(rule) = schema.heuristic_rule(&x.label) else {
            continue;
        };
        let mut best: Option<(usize, usize, bool, &str)> = None;
        for (yi, y) in slots.iter().enumerate() {
            if yi == xi {
                continue;
            }
            let Some(relation) = rule.relation_for(&y.label) else {
                continue;
            };
            let dist = x.gap(y);
            let after = y.start > x.start;
            let better = match best {
                None => true,
                Some((_, d, a, _)) => dist < d || (dist == d && after && !a),
            };
            if better {
                best = Some((yi, dist, after, relation));
            }
        }
        if let Some((yi, _, _, relation)) = best {
            let pair = SlotPair::new(xi, yi).expect("distinct slots");
            out.set(pair, Some(relation.to_string()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::utterance;
    use crate::fixtures;
    use crate::relex::RelationAssignment;
    use crate::schema::builtin;
    use alloc::vec::Vec;

    fn relations(a: &RelationAssignment) -> Vec<(usize, usize, &str)> {
        a.relations().map(|(p, l)| (p.first(), p.second(), l)).collect()
    }

    #[test]
    fn food_example_matches_gold() {
        let u = fixtures::food_burgers();
        let got = heuristic_extract(&u.slots, &builtin::food()).unwrap();
        assert_eq!(got, RelationAssignment::from_gold(&u));
        assert_eq!(relations(&got), [(0, 2, "numeric"), (1, 2, "size"), (3, 4, "numeric")]);
    }

    #[test]
    fn gaming_minimal_pair_is_indistinguishable() {
        let shared = fixtures::gaming_shared();
        let unshared = fixtures::gaming_unshared();
        let g = builtin::gaming();
        let a = heuristic_extract(&shared.slots, &g).unwrap();
        let b = heuristic_extract(&unshared.slots, &g).unwrap();
        assert_eq!(relations(&a), [(0, 1, "enchantment")]);
        assert_eq!(a, b);
        assert_ne!(a, RelationAssignment::from_gold(&shared));
        assert_eq!(b, RelationAssignment::from_gold(&unshared));
    }

    #[test]
    fn single_slot_or_no_modifiers_is_all_none() {
        let g = builtin::gaming();
        let u = utterance("s", "gaming", "swords", &[("item", 0, 1)], &[]).unwrap();
        assert!(heuristic_extract(&u.slots, &g).unwrap().is_empty());
        let u = utterance("s", "gaming", "swords and shields", &[("item", 0, 1), ("item", 2, 3)], &[]).unwrap();
        let a = heuristic_extract(&u.slots, &g).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.relations().count(), 0);
    }

    #[test]
    fn tie_goes_to_the_following_candidate() {
        let s = builtin::stocks();
        let u = utterance(
            "t",
            "stocks",
            "companies in europe excluding germany",
            &[("location", 2, 3), ("negation_modifier", 3, 4), ("location", 4, 5)],
            &[],
        )
        .unwrap();
        let a = heuristic_extract(&u.slots, &s).unwrap();
        assert_eq!(relations(&a), [(1, 2, "negation_relation")]);
    }

    #[test]
    fn nearest_left_candidate_beats_farther_right() {
        let (rb, _) = fixtures::stocks_europe();
        let a = heuristic_extract(&rb.slots, &builtin::stocks()).unwrap();
        // europe is adjacent to "outside", germany is one token away
        assert_eq!(relations(&a), [(0, 1, "negation_relation")]);
    }

    #[test]
    fn unknown_label_is_an_error() {
        let u = utterance("x", "food", "two dragons", &[("quantity", 0, 1), ("monster", 1, 2)], &[]).unwrap();
        assert_eq!(
            heuristic_extract(&u.slots, &builtin::food()),
            Err(RelexError::UnknownSlot("monster".into()))
        );
    }

    #[test]
    fn stocks_fixtures_with_filters() {
        let s = builtin::stocks();
        for (rb, _) in [fixtures::stocks_ebitda(), fixtures::stocks_dated_filters()] {
            let a = heuristic_extract(&rb.slots, &s).unwrap();
            assert_eq!(a, RelationAssignment::from_gold(&rb), "{}", rb.text);
        }
    }

    proptest::proptest! {
        #[test]
        fn output_ignores_slot_values(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let schema = builtin::food();
            let labels = ["plus", "minus", "quantity", "size"];
            let n = rng.gen_range(0..7);
            let mut text = alloc::string::String::new();
            let mut other = alloc::string::String::new();
            let mut spans = Vec::new();
            let mut pos = 0;
            for _ in 0..n {
                let gap = rng.gen_range(0..3);
                for _ in 0..gap {
                    text.push_str("and ");
                    other.push_str("and ");
                }
                pos += gap;
                text.push_str("foo ");
                other.push_str("bar ");
                spans.push((labels[rng.gen_range(0..4)], pos, pos + 1));
                pos += 1;
            }
            let a = utterance("a", "food", &text, &spans, &[]).unwrap();
            let b = utterance("b", "food", &other, &spans, &[]).unwrap();
            let ra = heuristic_extract(&a.slots, &schema).unwrap();
            let rb = heuristic_extract(&b.slots, &schema).unwrap();
            proptest::prop_assert_eq!(&ra, &rb);
            // at most one relation per modifier slot, all schema-valid
            let mut per_slot = alloc::vec![0usize; n];
            for (pair, label) in ra.relations() {
                let (x, y) = (&a.slots[pair.first()].label, &a.slots[pair.second()].label);
                proptest::prop_assert_eq!(schema.relation_for_pair(x, y).unwrap(), Some(label));
                let modifies = |m: &str, t: &str| schema.heuristic_rule(m).is_some_and(|r| r.relation_for(t).is_some());
                let modifier = if modifies(x, y) { pair.first() } else { pair.second() };
                per_slot[modifier] += 1;
            }
            proptest::prop_assert!(per_slot.iter().all(|&c| c <= 1));
            proptest::prop_assert_eq!(ra.len(), n * n.saturating_sub(1) / 2);
        }
    }
}
