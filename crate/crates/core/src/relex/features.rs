use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::annotation::{PairEncoding, BEGIN_SLOT, END_SLOT};
use crate::schema::DomainSchema;

const CONJUNCTIONS: &[&str] = &["and", "or", ",", "&", "plus"];
const ARTICLES: &[&str] = &["a", "an", "the"];

/// Feature families produced by [`pair_features`], in emission order.
pub const PAIR_TEMPLATES: &[&str] = &[
    "bias", "lp", "la", "lb", "cand", "d", "cand|d", "lp|d", "btw", "cand|btw", "nslots", "cand|nslots", "btwslot",
    "cand|btwslot", "a_prev", "a_next", "b_prev", "b_next", "cand|a_next", "cand|b_prev", "cand|b_next", "conj", "art",
    "cand|conj|art", "pat",
];

/// Bucket for the number of tokens between two slots: 0, 1, 2, 3-4, 5+.
pub fn distance_bucket(gap: usize) -> &'static str {
    match gap {
        0 => "0",
        1 => "1",
        2 => "2",
        3 | 4 => "3-4",
        _ => "5+",
    }
}

fn slots_between_bucket(n: usize) -> &'static str {
    match n {
        0 => "0",
        1 => "1",
        2 => "2",
        _ => "3+",
    }
}

/// Feature multiset for one pair encoding.
///
/// Features name the ordered label pair, each label, the schema relation the
/// pair could carry, the gap bucket, every token between the two slots, the
/// labels of slots lying between them, the tokens just outside each slot,
/// conjunction and article flags, and the full slot pattern. The schema
/// relation is also conjoined with the positional cues so evidence learned
/// on one slot-type pair carries over to another pair sharing the relation.
pub fn pair_features(enc: &PairEncoding, schema: &DomainSchema) -> Vec<String> {
    let original = enc.original_tokens();
    let (i, j) = (enc.pair.first(), enc.pair.second());
    let (la, lb) = (&enc.slot_labels[i], &enc.slot_labels[j]);
    let (sa, sb) = (enc.slot_spans[i], enc.slot_spans[j]);
    let (left, right) = if sa.0 <= sb.0 { (sa, sb) } else { (sb, sa) };
    let cand = schema.pair_relation_unchecked(la, lb).unwrap_or("none");

    let token = |k: Option<usize>| -> &str {
        match k {
            Some(k) if k < original.len() => original[k].as_str(),
            Some(_) => "</s>",
            None => "<s>",
        }
    };
    let between: &[String] = if left.1 <= right.0 { &original[left.1..right.0] } else { &[] };
    let gap = between.len();
    let dist = distance_bucket(gap);

    let conj = between.iter().any(|t| CONJUNCTIONS.contains(&t.as_str()));
    let art = between.iter().any(|t| ARTICLES.contains(&t.as_str()));
    let inner: Vec<&str> = enc
        .slot_spans
        .iter()
        .zip(&enc.slot_labels)
        .filter(|(s, _)| s.0 >= left.1 && s.1 <= right.0)
        .map(|(_, l)| l.as_str())
        .collect();

    let a_prev = token(sa.0.checked_sub(1));
    let a_next = token(Some(sa.1));
    let b_prev = token(sb.0.checked_sub(1));
    let b_next = token(Some(sb.1));

    let mut f = Vec::with_capacity(32 + 2 * gap);
    f.push(String::from("bias"));
    f.push(format!("lp={la}|{lb}"));
    f.push(format!("la={la}"));
    f.push(format!("lb={lb}"));
    f.push(format!("cand={cand}"));
    f.push(format!("d={dist}"));
    f.push(format!("cand|d={cand}|{dist}"));
    f.push(format!("lp|d={la}|{lb}|{dist}"));
    for t in between {
        f.push(format!("btw={t}"));
        f.push(format!("cand|btw={cand}|{t}"));
    }
    f.push(format!("nslots={}", slots_between_bucket(inner.len())));
    f.push(format!("cand|nslots={cand}|{}", slots_between_bucket(inner.len())));
    for l in &inner {
        f.push(format!("btwslot={l}"));
        f.push(format!("cand|btwslot={cand}|{l}"));
    }
    f.push(format!("a_prev={a_prev}"));
    f.push(format!("a_next={a_next}"));
    f.push(format!("b_prev={b_prev}"));
    f.push(format!("b_next={b_next}"));
    f.push(format!("cand|a_next={cand}|{a_next}"));
    f.push(format!("cand|b_prev={cand}|{b_prev}"));
    f.push(format!("cand|b_next={cand}|{b_next}"));
    f.push(format!("conj={conj}"));
    f.push(format!("art={art}"));
    f.push(format!("cand|conj|art={cand}|{conj}|{art}"));
    let pattern: Vec<&str> = enc.slot_labels.iter().map(String::as_str).collect();
    f.push(format!("pat={}", pattern.join(" ")));
    debug_assert!(enc.tokens.iter().filter(|t| *t == BEGIN_SLOT || *t == END_SLOT).count() == 4);
    f
}
