//! Compiles stocks-domain NLU output into back-end operations.
//!
//! The relation-based scheme treats slots as operands and relations as
//! operators: a `location` linked to a `negation_modifier` becomes an
//! excluding constraint, a `metric_name` linked through a `filter_modifier`
//! to an `amount` becomes a filter. The slot-based scheme reads the same
//! meaning straight off contextual labels such as `location_outside`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::annotation::{AnnotatedUtterance, SlotPair, SlotSpan};
use crate::relex::RelationAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Above,
    Below,
    Equal,
    AtLeast,
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Include,
    Exclude,
}

/// A back-end action. Values are lowercase surface strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Operation {
    MetricQuery {
        metric: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        date: Option<String>,
    },
    Filter {
        metric: String,
        comparator: Comparator,
        amount: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        date: Option<String>,
    },
    LocationConstraint { location: String, polarity: Polarity },
    SectorConstraint { sector: String, polarity: Polarity },
}

/// Order-insensitive set of operations for one utterance.
pub type OperationSet = BTreeSet<Operation>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("modifier `{0}` is not in the comparator lexicon")]
    UnknownModifier(String),
    #[error("relation `{relation}` cannot join `{a}` and `{b}`")]
    SchemaViolation { relation: String, a: String, b: String },
    #[error("amount `{0}` has no filter metric to attach to")]
    OrphanAmount(String),
}

/// Surface form of a filter modifier to comparator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparatorLexicon {
    entries: BTreeMap<String, Comparator>,
}

impl Default for ComparatorLexicon {
    fn default() -> Self {
        let mut lex = Self { entries: BTreeMap::new() };
        for (form, c) in [
            ("over", Comparator::Above),
            ("above", Comparator::Above),
            ("more", Comparator::Above),
            ("less", Comparator::Below),
            ("under", Comparator::Below),
            ("below", Comparator::Below),
            ("equal to", Comparator::Equal),
            ("at least", Comparator::AtLeast),
            ("or more", Comparator::AtLeast),
            ("at most", Comparator::AtMost),
            ("or less", Comparator::AtMost),
        ] {
            lex.insert(form, c);
        }
        lex
    }
}

impl ComparatorLexicon {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, form: &str, comparator: Comparator) {
        self.entries.insert(form.to_lowercase(), comparator);
    }

    pub fn get(&self, form: &str) -> Result<Comparator, LogicError> {
        self.entries
            .get(form)
            .copied()
            .ok_or_else(|| LogicError::UnknownModifier(form.to_string()))
    }

    pub fn forms(&self) -> impl Iterator<Item = (&str, Comparator)> {
        self.entries.iter().map(|(f, c)| (f.as_str(), *c))
    }
}

/// Endpoint slot types allowed for each stocks relation.
const RELATION_ENDPOINTS: &[(&str, &[(&str, &str)])] = &[
    ("filter_metric_relation", &[("filter_modifier", "metric_name")]),
    ("filter_amount_relation", &[("filter_modifier", "amount")]),
    ("negation_relation", &[("location", "negation_modifier"), ("sector_name", "negation_modifier")]),
    ("date_relation", &[("date_metric", "metric_name")]),
];

fn check_endpoints(relation: &str, a: &str, b: &str) -> Result<(), LogicError> {
    let ok = RELATION_ENDPOINTS
        .iter()
        .find(|(r, _)| *r == relation)
        .map(|(_, ends)| ends.iter().any(|&(x, y)| (x == a && y == b) || (x == b && y == a)))
        .unwrap_or(false);
    if ok {
        Ok(())
    } else {
        Err(LogicError::SchemaViolation {
            relation: relation.to_string(),
            a: a.to_string(),
            b: b.to_string(),
        })
    }
}

fn linked<'a>(
    slots: &'a [SlotSpan],
    assignment: &'a RelationAssignment,
    from: usize,
    relation: &'a str,
) -> impl Iterator<Item = usize> + 'a {
    (0..slots.len()).filter(move |&j| {
        SlotPair::new(from, j).is_some_and(|p| assignment.get(p) == Some(relation))
    })
}

/// Relation-based compilation over the utterance's slots and a relation
/// assignment for them.
pub fn compile_relation_based(
    u: &AnnotatedUtterance,
    assignment: &RelationAssignment,
    lex: &ComparatorLexicon,
) -> Result<OperationSet, LogicError> {
    let slots = &u.slots;
    for (pair, relation) in assignment.relations() {
        check_endpoints(relation, &slots[pair.first()].label, &slots[pair.second()].label)?;
    }
    let mut ops = OperationSet::new();
    for (i, s) in slots.iter().enumerate() {
        match s.label.as_str() {
            "location" | "sector_name" => {
                let polarity = if linked(slots, assignment, i, "negation_relation").next().is_some() {
                    Polarity::Exclude
                } else {
                    Polarity::Include
                };
                ops.insert(if s.label == "location" {
                    Operation::LocationConstraint { location: s.value.clone(), polarity }
                } else {
                    Operation::SectorConstraint { sector: s.value.clone(), polarity }
                });
            }
            "metric_name" => {
                let date = linked(slots, assignment, i, "date_relation")
                    .next()
                    .map(|d| slots[d].value.clone());
                let mut filters = Vec::new();
                for m in linked(slots, assignment, i, "filter_metric_relation") {
                    for a in linked(slots, assignment, m, "filter_amount_relation") {
                        filters.push(Operation::Filter {
                            metric: s.value.clone(),
                            comparator: lex.get(&slots[m].value)?,
                            amount: slots[a].value.clone(),
                            date: date.clone(),
                        });
                    }
                }
                if filters.is_empty() {
                    ops.insert(Operation::MetricQuery { metric: s.value.clone(), date });
                } else {
                    ops.extend(filters);
                }
            }
            _ => {}
        }
    }
    Ok(ops)
}

fn is_metric(label: &str) -> bool {
    label == "query_metric" || label == "filter_metric"
}

/// Slot-based compilation from contextual labels. Each filter amount joins
/// the nearest filter metric before it (or after it when none precedes); a
/// date joins the nearest metric, preferring the following one on a tie.
pub fn compile_slot_based(u: &AnnotatedUtterance) -> Result<OperationSet, LogicError> {
    let slots = &u.slots;
    let mut ops = OperationSet::new();
    let mut amounts: BTreeMap<usize, Vec<(Comparator, usize)>> = BTreeMap::new();
    let mut dates: BTreeMap<usize, usize> = BTreeMap::new();

    for (i, s) in slots.iter().enumerate() {
        let comparator = match s.label.as_str() {
            "filter_amount_above" => Comparator::Above,
            "filter_amount_below" => Comparator::Below,
            _ => continue,
        };
        let before = (0..i).rev().find(|&j| slots[j].label == "filter_metric");
        let after = (i + 1..slots.len()).find(|&j| slots[j].label == "filter_metric");
        let metric = before.or(after).ok_or_else(|| LogicError::OrphanAmount(s.value.clone()))?;
        amounts.entry(metric).or_default().push((comparator, i));
    }
    for (i, s) in slots.iter().enumerate() {
        if s.label != "date" {
            continue;
        }
        let nearest = slots
            .iter()
            .enumerate()
            .filter(|(_, m)| is_metric(&m.label))
            .min_by_key(|(j, m)| (s.gap(m), *j < i));
        if let Some((j, _)) = nearest {
            dates.entry(j).or_insert(i);
        }
    }

    for (i, s) in slots.iter().enumerate() {
        let value = s.value.clone();
        match s.label.as_str() {
            "location_inside" => {
                ops.insert(Operation::LocationConstraint { location: value, polarity: Polarity::Include });
            }
            "location_outside" => {
                ops.insert(Operation::LocationConstraint { location: value, polarity: Polarity::Exclude });
            }
            "sector" => {
                ops.insert(Operation::SectorConstraint { sector: value, polarity: Polarity::Include });
            }
            "sector_outside" => {
                ops.insert(Operation::SectorConstraint { sector: value, polarity: Polarity::Exclude });
            }
            label if is_metric(label) => {
                let date = dates.get(&i).map(|&d| slots[d].value.clone());
                match amounts.get(&i) {
                    Some(list) => {
                        for &(comparator, a) in list {
                            ops.insert(Operation::Filter {
                                metric: value.clone(),
                                comparator,
                                amount: slots[a].value.clone(),
                                date: date.clone(),
                            });
                        }
                    }
                    None => {
                        ops.insert(Operation::MetricQuery { metric: value, date });
                    }
                }
            }
            _ => {}
        }
    }
    Ok(ops)
}

/// True iff both operation sets are structurally equal.
pub fn operations_exact_match(gold: &OperationSet, pred: &OperationSet) -> bool {
    gold == pred
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::utterance;
    use crate::fixtures;
    use alloc::vec;

    fn loc(l: &str, p: Polarity) -> Operation {
        Operation::LocationConstraint { location: l.into(), polarity: p }
    }

    fn filter(m: &str, c: Comparator, a: &str, d: Option<&str>) -> Operation {
        Operation::Filter { metric: m.into(), comparator: c, amount: a.into(), date: d.map(Into::into) }
    }

    fn gold_rb(u: &AnnotatedUtterance) -> OperationSet {
        compile_relation_based(u, &RelationAssignment::from_gold(u), &ComparatorLexicon::default()).unwrap()
    }

    #[test]
    fn europe_outside_germany() {
        let (rb, sb) = fixtures::stocks_europe();
        let expected: OperationSet = [loc("europe", Polarity::Include), loc("germany", Polarity::Exclude)].into();
        assert_eq!(gold_rb(&rb), expected);
        assert_eq!(compile_slot_based(&sb).unwrap(), expected);
    }

    #[test]
    fn ebitda_with_two_filters() {
        let (rb, sb) = fixtures::stocks_ebitda();
        let expected: OperationSet = [
            Operation::MetricQuery { metric: "ebitda".into(), date: None },
            filter("market cap", Comparator::Above, "million", None),
            filter("revenue", Comparator::Below, "2 million", None),
        ]
        .into();
        assert_eq!(gold_rb(&rb), expected);
        assert_eq!(compile_slot_based(&sb).unwrap(), expected);
    }

    #[test]
    fn dated_filters() {
        let (rb, sb) = fixtures::stocks_dated_filters();
        let expected: OperationSet = [
            filter("market cap", Comparator::Above, "million", Some("2018")),
            filter("revenue", Comparator::Below, "2 million", Some("2019")),
        ]
        .into();
        assert_eq!(gold_rb(&rb), expected);
        assert_eq!(compile_slot_based(&sb).unwrap(), expected);
    }

    #[test]
    fn slot_based_table_one_example() {
        let u = fixtures::stocks_healthcare_slot_based();
        let got = compile_slot_based(&u).unwrap();
        assert!(got.contains(&Operation::SectorConstraint { sector: "healthcare".into(), polarity: Polarity::Include }));
        assert!(got.contains(&loc("germany", Polarity::Exclude)));
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn empty_inputs() {
        let u = utterance("e", "stocks", "hello", &[], &[]).unwrap();
        assert!(gold_rb(&u).is_empty());
        assert!(compile_slot_based(&u).unwrap().is_empty());
    }

    #[test]
    fn polarity_defaults_to_include() {
        let (rb, _) = fixtures::stocks_europe();
        let none = RelationAssignment::all_none(rb.slots.len());
        let got = compile_relation_based(&rb, &none, &ComparatorLexicon::default()).unwrap();
        assert!(got.iter().all(|op| matches!(op, Operation::LocationConstraint { polarity: Polarity::Include, .. })));
    }

    #[test]
    fn unknown_modifier_is_an_error() {
        let (rb, _) = fixtures::stocks_ebitda();
        let err = compile_relation_based(&rb, &RelationAssignment::from_gold(&rb), &ComparatorLexicon::empty());
        assert_eq!(err, Err(LogicError::UnknownModifier("over".into())));
    }

    #[test]
    fn extended_lexicon_derives_new_comparators() {
        let u = utterance(
            "x",
            "stocks",
            "companies with revenue equal to 5 million",
            &[("metric_name", 2, 3), ("filter_modifier", 3, 5), ("amount", 5, 7)],
            &[(0, 1, "filter_metric_relation"), (1, 2, "filter_amount_relation")],
        )
        .unwrap();
        let got = gold_rb(&u);
        assert_eq!(got, [filter("revenue", Comparator::Equal, "5 million", None)].into());
    }

    #[test]
    fn schema_violating_relation_is_an_error() {
        let (rb, _) = fixtures::stocks_europe();
        let mut a = RelationAssignment::all_none(3);
        a.set(SlotPair::new(0, 2).unwrap(), Some("negation_relation".into()));
        assert!(matches!(
            compile_relation_based(&rb, &a, &ComparatorLexicon::default()),
            Err(LogicError::SchemaViolation { .. })
        ));
    }

    #[test]
    fn orphan_amount_is_an_error() {
        let u = utterance("o", "stocks_slot_based", "over 5 million", &[("filter_amount_above", 1, 3)], &[]).unwrap();
        assert_eq!(compile_slot_based(&u), Err(LogicError::OrphanAmount("5 million".into())));
    }

    #[test]
    fn exact_match_is_set_equality() {
        let a: OperationSet = [loc("europe", Polarity::Include), loc("germany", Polarity::Exclude)].into();
        let b: OperationSet = vec![loc("germany", Polarity::Exclude), loc("europe", Polarity::Include)].into_iter().collect();
        assert!(operations_exact_match(&a, &a));
        assert!(operations_exact_match(&a, &b));
        let missing: OperationSet = [loc("europe", Polarity::Include)].into();
        assert!(!operations_exact_match(&a, &missing));
    }

    #[test]
    fn sector_negation_compiles_to_exclude() {
        let u = utterance(
            "s",
            "stocks",
            "show me companies in asia excluding energy companies",
            &[("location", 4, 5), ("negation_modifier", 5, 6), ("sector_name", 6, 7)],
            &[(1, 2, "negation_relation")],
        )
        .unwrap();
        let got = gold_rb(&u);
        assert!(got.contains(&Operation::SectorConstraint { sector: "energy".into(), polarity: Polarity::Exclude }));
        assert!(got.contains(&loc("asia", Polarity::Include)));
    }
}
