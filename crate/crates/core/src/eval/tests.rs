use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::annotation::{utterance, AnnotatedUtterance, SlotPair};
use crate::datagen::{generate, GeneratorConfig};
use crate::fixtures;
use crate::relex::{ExtractorKind, RelationAssignment};
use crate::schema::builtin;

fn assignment(n: usize, labels: &[(usize, usize, &str)]) -> RelationAssignment {
    let mut a = RelationAssignment::all_none(n);
    for &(i, j, l) in labels {
        a.set(SlotPair::new(i, j).unwrap(), Some(l.into()));
    }
    a
}

fn one(id: &str, a: RelationAssignment) -> CorpusAssignments {
    [(id.into(), a)].into()
}

#[test]
fn worked_example() {
    let gold = one("u", assignment(5, &[(0, 2, "numeric"), (1, 2, "size"), (3, 4, "numeric")]));
    let pred = one("u", assignment(5, &[(0, 2, "numeric"), (3, 4, "numeric")]));
    let r = relation_scores(&gold, &pred).unwrap();
    assert_eq!(r.overall.p, 1.0);
    assert!((r.overall.r - 2.0 / 3.0).abs() < 1e-12);
    assert!((r.overall.f1 - 0.8).abs() < 1e-12);
    assert_eq!(r.overall.em, 0.0);
    assert_eq!(r.counts.gold_relations, 3);
    assert_eq!(r.counts.predicted_relations, 2);
    assert_eq!(r.per_label["size"].fn_, 1);
    assert_eq!(r.label_f1("numeric"), 1.0);
}

#[test]
fn identity_and_relation_free_utterances() {
    let gold: CorpusAssignments = [
        ("a".into(), assignment(3, &[(0, 1, "size")])),
        ("b".into(), assignment(2, &[])),
        ("c".into(), assignment(0, &[])),
    ]
    .into();
    let r = relation_scores(&gold, &gold).unwrap();
    assert_eq!((r.overall.f1, r.overall.em), (1.0, 1.0));
    assert_eq!(r.counts.utterances, 3);
    assert_eq!(r.counts.exact_matches, 3);

    let empty: CorpusAssignments = [("b".into(), assignment(2, &[]))].into();
    let r = relation_scores(&empty, &empty).unwrap();
    assert_eq!((r.overall.p, r.overall.r, r.overall.f1, r.overall.em), (0.0, 0.0, 0.0, 1.0));
}

#[test]
fn spurious_prediction_breaks_exact_match() {
    let gold = one("u", assignment(3, &[]));
    let pred = one("u", assignment(3, &[(0, 1, "size")]));
    let r = relation_scores(&gold, &pred).unwrap();
    assert_eq!(r.overall.em, 0.0);
    assert_eq!(r.per_label["size"].fp, 1);
}

#[test]
fn mismatches_are_errors() {
    let gold = one("u", assignment(3, &[]));
    assert!(matches!(relation_scores(&gold, &one("v", assignment(3, &[]))), Err(EvalError::IdMismatch(_))));
    assert!(matches!(relation_scores(&gold, &one("u", assignment(4, &[]))), Err(EvalError::PairMismatch(_))));
}

fn slots_utt(id: &str, n: usize) -> AnnotatedUtterance {
    let text: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let slots: Vec<(&str, usize, usize)> = (0..n).map(|i| ("item", i, i + 1)).collect();
    utterance(id, "gaming", &text.join(" "), &slots, &[]).unwrap()
}

#[test]
fn buckets_partition_by_slot_count() {
    let corpus = vec![slots_utt("a", 2), slots_utt("b", 2), slots_utt("c", 4)];
    let gold: CorpusAssignments = corpus.iter().map(|u| (u.id.clone(), RelationAssignment::from_gold(u))).collect();
    let b = bucket_by_slot_count(&corpus, &gold, &gold).unwrap();
    assert_eq!(b.keys().copied().collect::<Vec<_>>(), [2, 4]);
    assert_eq!(b[&2].counts.utterances, 2);
    assert_eq!(b[&4].counts.utterances, 1);

    let same = vec![slots_utt("a", 3), slots_utt("b", 3)];
    let g: CorpusAssignments = same.iter().map(|u| (u.id.clone(), RelationAssignment::from_gold(u))).collect();
    let mut p = g.clone();
    p.get_mut("a").unwrap().set(SlotPair::new(0, 1).unwrap(), Some("size".into()));
    let buckets = bucket_by_slot_count(&same, &g, &p).unwrap();
    let overall = relation_scores(&g, &p).unwrap();
    assert_eq!(buckets.len(), 1);
    assert_eq!(buckets[&3].overall, overall.overall);
    assert_eq!(buckets[&3].counts, overall.counts);
}

#[test]
fn span_scores_equal_assignment_scores_on_gold_slots() {
    let u = fixtures::food_burgers();
    let mut wrong = u.clone();
    wrong.relations.remove(&SlotPair::new(1, 2).unwrap());
    wrong.relations.insert(SlotPair::new(0, 4).unwrap(), "numeric".into());
    let span = span_relation_scores(core::slice::from_ref(&u), core::slice::from_ref(&wrong)).unwrap().report();
    let assign = relation_scores(
        &one(&u.id, RelationAssignment::from_gold(&u)),
        &one(&u.id, RelationAssignment::from_gold(&wrong)),
    )
    .unwrap();
    assert_eq!(span.overall, assign.overall);
    assert_eq!(span.counts, assign.counts);

    // a shifted slot loses its relation and the exact match
    let shifted = u.with_slots({
        let mut s = u.slots.clone();
        s[1].start -= 1;
        s
    });
    let t = span_relation_scores(core::slice::from_ref(&u), &[shifted]).unwrap();
    assert_eq!(t.exact, 0);
    assert_eq!(t.micro().fn_, 3);
}

#[test]
fn pair_type_filter() {
    let u = fixtures::gaming_shared();
    let pred = one(&u.id, assignment(3, &[(0, 1, "enchantment")]));
    let c = pair_type_scores(&[u], &pred, "item", "enchantment").unwrap();
    assert_eq!((c.tp, c.fp, c.fn_), (1, 0, 1));
}

#[test]
fn aggregate_mean_and_range() {
    let mut reports = Vec::new();
    for f in [0.5, 0.7, 0.9] {
        let mut r = Tally::default().report();
        r.overall.f1 = f;
        reports.push(r);
    }
    let a = aggregate(reports).unwrap();
    assert!((a.f1.mean - 0.7).abs() < 1e-12);
    assert!((a.f1.range() - 0.4).abs() < 1e-12);
    assert!(aggregate(Vec::new()).is_none());
}

fn pattern_pool() -> Vec<AnnotatedUtterance> {
    let mut pool = Vec::new();
    for (n, count) in [(1usize, 5usize), (2, 3), (3, 2), (4, 4), (5, 6)] {
        for i in 0..count {
            pool.push(slots_utt(&format!("p{n}-{i}"), n));
        }
    }
    pool
}

#[test]
fn pattern_groups_stay_whole() {
    let pool = pattern_pool();
    let (train, test) = pattern_split(&pool, 3).unwrap();
    assert_eq!(train.len() + test.len(), pool.len());
    assert!(!train.is_empty() && !test.is_empty());
    let trp: BTreeSet<_> = train.iter().map(|u| u.slot_pattern()).collect();
    let tep: BTreeSet<_> = test.iter().map(|u| u.slot_pattern()).collect();
    assert!(trp.is_disjoint(&tep));
}

#[test]
fn pattern_split_needs_two_patterns() {
    let pool = vec![slots_utt("a", 2), slots_utt("b", 2)];
    assert_eq!(pattern_split(&pool, 0), Err(EvalError::TooFewPatterns(1)));
}

#[test]
fn seven_seeds_give_distinct_pattern_splits() {
    let (corpus, _) = generate(&GeneratorConfig::for_domain("food").unwrap().with_total(400), &builtin::food()).unwrap();
    let pool = corpus.all();
    let splits: BTreeSet<Vec<String>> = (0..7)
        .map(|seed| pattern_split(&pool, seed).unwrap().1.into_iter().map(|u| u.id).collect())
        .collect();
    assert_eq!(splits.len(), 7);
}

use alloc::collections::BTreeSet;
use alloc::string::String;

proptest! {
    #[test]
    fn pattern_split_disjoint_for_any_seed(seed in any::<u64>()) {
        let pool = pattern_pool();
        let (train, test) = pattern_split(&pool, seed).unwrap();
        let trp: BTreeSet<_> = train.iter().map(|u| u.slot_pattern()).collect();
        let tep: BTreeSet<_> = test.iter().map(|u| u.slot_pattern()).collect();
        prop_assert!(trp.is_disjoint(&tep));
        prop_assert!(!train.is_empty() && !test.is_empty());
    }

    #[test]
    fn random_split_is_a_partition(seed in any::<u64>(), n in 2usize..40) {
        let pool: Vec<_> = (0..n).map(|i| slots_utt(&format!("r{i}"), 1 + i % 3)).collect();
        let (train, test) = random_split(&pool, 0.3, seed).unwrap();
        let mut ids: Vec<_> = train.iter().chain(&test).map(|u| u.id.clone()).collect();
        ids.sort();
        let mut expected: Vec<_> = pool.iter().map(|u| u.id.clone()).collect();
        expected.sort();
        prop_assert_eq!(ids, expected);
    }

    #[test]
    fn exact_match_is_one_iff_all_equal(flips in proptest::collection::vec(any::<bool>(), 1..10)) {
        let gold: CorpusAssignments = flips.iter().enumerate()
            .map(|(i, _)| (format!("u{i}"), assignment(3, &[(0, 1, "size")])))
            .collect();
        let pred: CorpusAssignments = flips.iter().enumerate()
            .map(|(i, &f)| (format!("u{i}"), assignment(3, if f { &[(0, 1, "size")] } else { &[] })))
            .collect();
        let r = relation_scores(&gold, &pred).unwrap();
        prop_assert!(r.overall.em <= 1.0);
        prop_assert_eq!(r.overall.em == 1.0, flips.iter().all(|&f| f));
    }
}

#[test]
fn heuristic_exact_match_falls_with_slot_count_on_food() {
    let mut config = GeneratorConfig::for_domain("food").unwrap().with_total(1000);
    config.seed = 2;
    let schema = builtin::food();
    let (corpus, _) = generate(&config, &schema).unwrap();
    let r = run_on_split(&corpus.train, &corpus.test, ExtractorKind::Heuristic, &schema, &ExperimentOptions::default(), 0)
        .unwrap();
    assert!(r.buckets[&5].overall.em < r.buckets[&2].overall.em);
    let total: usize = r.buckets.values().map(|b| b.counts.utterances).sum();
    assert_eq!(total, corpus.test.len());
}
