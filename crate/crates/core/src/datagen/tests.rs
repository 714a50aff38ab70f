use super::*;
use crate::logic::{compile_relation_based, compile_slot_based, ComparatorLexicon};

fn small(domain: &str, total: usize, seed: u64) -> GeneratorConfig {
    let mut c = GeneratorConfig::for_domain(domain).unwrap().with_total(total);
    c.seed = seed;
    c
}

#[test]
fn small_corpora_validate() {
    for domain in ["food", "gaming", "stocks"] {
        let schema = builtin::by_name(domain).unwrap();
        let (corpus, manifest) = generate(&small(domain, 300, 1), &schema).unwrap();
        assert_eq!((corpus.train.len(), corpus.dev.len(), corpus.test.len()), (210, 45, 45));
        for u in corpus.all() {
            assert!(u.validate(&schema).is_empty(), "{domain}: {} {:?}", u.text, u.validate(&schema));
            assert!((1..=6).contains(&u.slots.len()));
        }
        assert_eq!(manifest.stats["train"].utterances, 210);
        let texts: BTreeSet<_> = corpus.all().into_iter().map(|u| u.text).collect();
        assert_eq!(texts.len(), 300, "texts are distinct");
    }
}

#[test]
fn ids_follow_split_and_index() {
    let (corpus, _) = generate(&small("gaming", 100, 2), &builtin::gaming()).unwrap();
    assert_eq!(corpus.train[0].id, "gaming-train-00000");
    assert_eq!(corpus.test[14].id, "gaming-test-00014");
}

#[test]
fn same_seed_same_corpus() {
    let a = generate(&small("food", 200, 9), &builtin::food()).unwrap();
    let b = generate(&small("food", 200, 9), &builtin::food()).unwrap();
    assert_eq!(a, b);
    let c = generate(&small("food", 200, 10), &builtin::food()).unwrap();
    assert_ne!(a.0, c.0);
}

#[test]
fn ambiguity_quota_is_exact_per_split() {
    let schema = builtin::food();
    let (corpus, manifest) = generate(&small("food", 600, 4), &schema).unwrap();
    for (name, split) in corpus.splits() {
        let measured = split.iter().filter(|u| is_ambiguous(u, &schema)).count();
        let expected = (0.15 * split.len() as f64 + 0.5) as usize;
        assert_eq!(measured, expected, "{name}");
        assert_eq!(manifest.stats[name].ambiguous, expected);
    }
}

#[test]
fn zero_ambiguity_gives_heuristic_friendly_corpus() {
    let schema = builtin::stocks();
    let (corpus, _) = generate(&small("stocks", 300, 5), &schema).unwrap();
    assert!(corpus.all().iter().all(|u| !is_ambiguous(u, &schema)));
}

#[test]
fn stocks_schemes_are_parallel_and_equivalent() {
    let (corpus, _) = generate(&small("stocks", 400, 6), &builtin::stocks()).unwrap();
    let sb = corpus.slot_based_by_id();
    let sb_schema = builtin::stocks_slot_based();
    let lex = ComparatorLexicon::default();
    assert_eq!(sb.len(), 400);
    for u in corpus.all() {
        let s = &sb[&u.id];
        assert_eq!(s.text, u.text);
        assert!(s.validate(&sb_schema).is_empty());
        let rb_ops = compile_relation_based(&u, &RelationAssignment::from_gold(&u), &lex).unwrap();
        assert_eq!(compile_slot_based(s).unwrap(), rb_ops, "{}", u.text);
    }
}

#[test]
fn shared_enchantments_reach_only_bare_conjoined_heads() {
    let (corpus, _) = generate(&small("gaming", 400, 7), &builtin::gaming()).unwrap();
    let mut shared = 0;
    for u in corpus.all() {
        for (p, label) in &u.relations {
            let (a, b) = (&u.slots[p.first()], &u.slots[p.second()]);
            if label == "enchantment" && a.gap(b) > 0 {
                let before = &u.tokens[b.start - 1];
                assert!(before == "and" || before == ",", "{}", u.text);
                shared += 1;
            }
        }
    }
    assert!(shared > 0);
}

#[test]
fn invalid_configs() {
    let mut c = small("food", 100, 0);
    c.ambiguity_rate = 1.5;
    assert!(matches!(generate(&c, &builtin::food()), Err(DatagenError::InvalidConfig(_))));
    let mut c = small("food", 100, 0);
    c.domain = "weather".into();
    assert!(matches!(generate(&c, &builtin::food()), Err(DatagenError::UnknownDomain(_))));
    let c = small("food", 100, 0);
    assert!(matches!(generate(&c, &builtin::gaming()), Err(DatagenError::InvalidConfig(_))));
}

#[test]
fn capacity_is_an_error() {
    let mut c = small("stocks", 3000, 0);
    c.slot_counts = [(1, 1.0)].into();
    assert!(matches!(generate(&c, &builtin::stocks()), Err(DatagenError::Capacity { .. })));
}

#[test]
fn zero_shot_split_containment() {
    let (corpus, _) = generate(&small("gaming", 700, 3), &builtin::gaming()).unwrap();
    let all = corpus.all();
    let held = HeldOut::pair("enchantment", "monster");
    let available = all.iter().filter(|u| held.exhibited_by(u)).count();
    for k in [0, 8, 16] {
        let z = make_zero_shot_split(&all, &held, k, 20, 11).unwrap();
        assert_eq!(z.train.iter().filter(|u| held.exhibited_by(u)).count(), k);
        assert_eq!(z.test.len(), 20);
        assert!(z.test.iter().all(|u| held.exhibited_by(u)));
        assert_eq!(z.train.len(), all.len() - available + k);
        let train_ids: BTreeSet<_> = z.train.iter().map(|u| &u.id).collect();
        assert!(z.test.iter().all(|u| !train_ids.contains(&u.id)));
    }
    let t0 = make_zero_shot_split(&all, &held, 0, 20, 11).unwrap().test;
    let t16 = make_zero_shot_split(&all, &held, 16, 20, 11).unwrap().test;
    assert_eq!(t0, t16);
    assert!(matches!(
        make_zero_shot_split(&all, &held, available, 1, 0),
        Err(DatagenError::InsufficientConstruct { .. })
    ));
}

#[test]
fn held_out_slot_detection() {
    let (_, sb) = crate::fixtures::stocks_europe();
    assert!(HeldOut::slot("location_outside").exhibited_by(&sb));
    assert!(!HeldOut::slot("sector_outside").exhibited_by(&sb));
    assert_eq!(HeldOut::slot("x").default_test_size(), 90);
    assert_eq!(HeldOut::pair("x", "y").default_test_size(), 50);
}

#[test]
fn inventory_lists_every_domain() {
    for d in ["food", "gaming", "stocks"] {
        assert!(inventory(d).unwrap().starts_with(d));
    }
    assert!(inventory("weather").is_none());
}
