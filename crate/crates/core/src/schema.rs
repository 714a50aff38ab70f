//! Per-domain relation schemas.
//!
//! A schema declares the slot types of a domain, the relation labels, which
//! unordered slot-type pairs may carry which label, and the modifier rules
//! that drive the rule-based extractor. Relations are non-directional and a
//! pair of slot types has at most one possible label; every other pair is
//! implicitly `None`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Errors raised while loading or querying a schema.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("malformed schema document: {0}")]
    Parse(String),
    #[error("slot pair ({0}, {1}) declared more than once")]
    DuplicatePair(String, String),
    #[error("undeclared slot type `{0}`")]
    UnknownSlot(String),
    #[error("undeclared relation label `{0}`")]
    UnknownRelation(String),
    #[error("heuristic rule {modifier} -> {modified} ({relation}) disagrees with the pair relations")]
    InconsistentRule {
        modifier: String,
        modified: String,
        relation: String,
    },
    #[error("modifier `{0}` has more than one heuristic rule")]
    DuplicateModifier(String),
}

/// One target of a modifier rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RuleTarget {
    pub modified: String,
    pub relation: String,
}

/// A modifier slot type and the slot types it may attach to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicRule {
    pub modifier: String,
    pub targets: Vec<RuleTarget>,
}

impl HeuristicRule {
    /// The relation this rule assigns when the modifier attaches to `modified`.
    pub fn relation_for(&self, modified: &str) -> Option<&str> {
        self.targets
            .iter()
            .find(|t| t.modified == modified)
            .map(|t| t.relation.as_str())
    }
}

/// Wire form of a schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaDocument {
    pub domain: String,
    pub slot_types: Vec<String>,
    pub relation_types: Vec<String>,
    pub pair_relations: Vec<PairRelation>,
    #[serde(default)]
    pub heuristic: Vec<HeuristicRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRelation {
    pub slots: [String; 2],
    pub relation: String,
}

/// A validated, immutable domain schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSchema {
    domain: String,
    slot_types: BTreeSet<String>,
    relation_types: BTreeSet<String>,
    // keyed by the lexicographically ordered slot-type pair
    pair_rules: BTreeMap<(String, String), String>,
    heuristic: Vec<HeuristicRule>,
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Parses and validates a JSON schema document.
pub fn load_schema(source: &str) -> Result<DomainSchema, SchemaError> {
    let doc: SchemaDocument =
        serde_json::from_str(source).map_err(|e| SchemaError::Parse(e.to_string()))?;
    DomainSchema::from_document(doc)
}

impl DomainSchema {
    pub fn from_document(doc: SchemaDocument) -> Result<Self, SchemaError> {
        let slot_types: BTreeSet<String> = doc.slot_types.into_iter().collect();
        let relation_types: BTreeSet<String> = doc.relation_types.into_iter().collect();

        let mut pair_rules = BTreeMap::new();
        for rule in doc.pair_relations {
            let [a, b] = rule.slots;
            for s in [&a, &b] {
                if !slot_types.contains(s) {
                    return Err(SchemaError::UnknownSlot(s.clone()));
                }
            }
            if !relation_types.contains(&rule.relation) {
                return Err(SchemaError::UnknownRelation(rule.relation));
            }
            let key = ordered(&a, &b);
            if pair_rules.contains_key(&key) {
                return Err(SchemaError::DuplicatePair(key.0, key.1));
            }
            pair_rules.insert(key, rule.relation);
        }

        let mut seen_modifiers = BTreeSet::new();
        for rule in &doc.heuristic {
            if !slot_types.contains(&rule.modifier) {
                return Err(SchemaError::UnknownSlot(rule.modifier.clone()));
            }
            if !seen_modifiers.insert(rule.modifier.clone()) {
                return Err(SchemaError::DuplicateModifier(rule.modifier.clone()));
            }
            for target in &rule.targets {
                if !slot_types.contains(&target.modified) {
                    return Err(SchemaError::UnknownSlot(target.modified.clone()));
                }
                if !relation_types.contains(&target.relation) {
                    return Err(SchemaError::UnknownRelation(target.relation.clone()));
                }
                let expected = pair_rules.get(&ordered(&rule.modifier, &target.modified));
                if expected != Some(&target.relation) {
                    return Err(SchemaError::InconsistentRule {
                        modifier: rule.modifier.clone(),
                        modified: target.modified.clone(),
                        relation: target.relation.clone(),
                    });
                }
            }
        }

        Ok(Self {
            domain: doc.domain,
            slot_types,
            relation_types,
            pair_rules,
            heuristic: doc.heuristic,
        })
    }

    /// Canonical document form: identifiers and pair rules sorted, heuristic
    /// rules in declaration order.
    pub fn to_document(&self) -> SchemaDocument {
        SchemaDocument {
            domain: self.domain.clone(),
            slot_types: self.slot_types.iter().cloned().collect(),
            relation_types: self.relation_types.iter().cloned().collect(),
            pair_relations: self
                .pair_rules
                .iter()
                .map(|((a, b), r)| PairRelation {
                    slots: [a.clone(), b.clone()],
                    relation: r.clone(),
                })
                .collect(),
            heuristic: self.heuristic.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("schema documents serialize")
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn slot_types(&self) -> impl Iterator<Item = &str> {
        self.slot_types.iter().map(String::as_str)
    }

    pub fn relation_types(&self) -> impl Iterator<Item = &str> {
        self.relation_types.iter().map(String::as_str)
    }

    pub fn has_slot_type(&self, label: &str) -> bool {
        self.slot_types.contains(label)
    }

    pub fn has_relation(&self, label: &str) -> bool {
        self.relation_types.contains(label)
    }

    pub fn pair_rules(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.pair_rules
            .iter()
            .map(|((a, b), r)| (a.as_str(), b.as_str(), r.as_str()))
    }

    pub fn heuristic_rules(&self) -> &[HeuristicRule] {
        &self.heuristic
    }

    pub fn heuristic_rule(&self, modifier: &str) -> Option<&HeuristicRule> {
        self.heuristic.iter().find(|r| r.modifier == modifier)
    }

    /// Relation label for an unordered slot-type pair; `Ok(None)` is the
    /// implicit `None` relation.
    pub fn relation_for_pair(&self, a: &str, b: &str) -> Result<Option<&str>, SchemaError> {
        for s in [a, b] {
            if !self.slot_types.contains(s) {
                return Err(SchemaError::UnknownSlot(s.to_string()));
            }
        }
        Ok(self.pair_relation_unchecked(a, b))
    }

    pub(crate) fn pair_relation_unchecked(&self, a: &str, b: &str) -> Option<&str> {
        let key = if a <= b { (a, b) } else { (b, a) };
        // BTreeMap<(String, String), _> can't be probed with (&str, &str)
        self.pair_rules
            .iter()
            .find(|((x, y), _)| x == key.0 && y == key.1)
            .map(|(_, r)| r.as_str())
    }
}

/// The schemas shipped with the crate.
pub mod builtin {
    use super::{load_schema, DomainSchema};

    pub const FOOD: &str = include_str!("../schemas/food.json");
    pub const GAMING: &str = include_str!("../schemas/gaming.json");
    pub const STOCKS: &str = include_str!("../schemas/stocks.json");
    /// Legacy contextual slot labels for the stocks domain; no relations.
    pub const STOCKS_SLOT_BASED: &str = include_str!("../schemas/stocks_slot_based.json");

    pub fn food() -> DomainSchema {
        load_schema(FOOD).expect("bundled food schema is valid")
    }

    pub fn gaming() -> DomainSchema {
        load_schema(GAMING).expect("bundled gaming schema is valid")
    }

    pub fn stocks() -> DomainSchema {
        load_schema(STOCKS).expect("bundled stocks schema is valid")
    }

    pub fn stocks_slot_based() -> DomainSchema {
        load_schema(STOCKS_SLOT_BASED).expect("bundled slot-based stocks schema is valid")
    }

    /// Looks up a bundled schema by domain name.
    pub fn by_name(domain: &str) -> Option<DomainSchema> {
        match domain {
            "food" | "food-order" | "food_order" => Some(food()),
            "gaming" => Some(gaming()),
            "stocks" => Some(stocks()),
            "stocks_slot_based" => Some(stocks_slot_based()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn food_schema_has_six_pair_rules() {
        let s = builtin::food();
        assert_eq!(s.pair_rules().count(), 6);
        let slots: Vec<_> = s.slot_types().collect();
        assert_eq!(slots, vec!["minus", "plus", "quantity", "size"]);
    }

    #[test]
    fn stocks_schema_has_negation_on_location() {
        let s = builtin::stocks();
        assert_eq!(s.pair_rules().count(), 5);
        assert_eq!(
            s.relation_for_pair("location", "negation_modifier").unwrap(),
            Some("negation_relation")
        );
    }

    #[test]
    fn gaming_location_label_is_normalized() {
        let s = builtin::gaming();
        assert_eq!(s.relation_for_pair("monster", "map").unwrap(), Some("location"));
    }

    #[test]
    fn lookup_is_symmetric_and_defaults_to_none() {
        let s = builtin::food();
        assert_eq!(s.relation_for_pair("plus", "quantity").unwrap(), Some("numeric"));
        assert_eq!(s.relation_for_pair("quantity", "plus").unwrap(), Some("numeric"));
        assert_eq!(s.relation_for_pair("quantity", "size").unwrap(), None);
        assert_eq!(s.relation_for_pair("plus", "plus").unwrap(), Some("add_topping"));
    }

    #[test]
    fn unknown_slot_is_an_error() {
        let s = builtin::food();
        assert_eq!(
            s.relation_for_pair("plus", "dragon"),
            Err(SchemaError::UnknownSlot("dragon".into()))
        );
    }

    #[test]
    fn duplicate_pair_is_rejected() {
        let src = r#"{"domain":"x","slot_types":["plus","quantity"],"relation_types":["numeric","other"],
            "pair_relations":[{"slots":["plus","quantity"],"relation":"numeric"},
                              {"slots":["quantity","plus"],"relation":"other"}],"heuristic":[]}"#;
        assert!(matches!(load_schema(src), Err(SchemaError::DuplicatePair(..))));
    }

    #[test]
    fn undeclared_identifiers_are_rejected() {
        let src = r#"{"domain":"x","slot_types":["plus"],"relation_types":["numeric"],
            "pair_relations":[{"slots":["plus","quantity"],"relation":"numeric"}]}"#;
        assert_eq!(load_schema(src), Err(SchemaError::UnknownSlot("quantity".into())));
        let src = r#"{"domain":"x","slot_types":["plus","quantity"],"relation_types":[],
            "pair_relations":[{"slots":["plus","quantity"],"relation":"numeric"}]}"#;
        assert_eq!(load_schema(src), Err(SchemaError::UnknownRelation("numeric".into())));
    }

    #[test]
    fn inconsistent_heuristic_rule_is_rejected() {
        let src = r#"{"domain":"x","slot_types":["plus","quantity","size"],"relation_types":["numeric"],
            "pair_relations":[{"slots":["plus","quantity"],"relation":"numeric"}],
            "heuristic":[{"modifier":"size","targets":[{"modified":"plus","relation":"numeric"}]}]}"#;
        assert!(matches!(load_schema(src), Err(SchemaError::InconsistentRule { .. })));
    }

    #[test]
    fn malformed_document_is_a_parse_error() {
        assert!(matches!(load_schema("{not json"), Err(SchemaError::Parse(_))));
    }

    #[test]
    fn round_trip_through_json() {
        for s in [builtin::food(), builtin::gaming(), builtin::stocks(), builtin::stocks_slot_based()] {
            assert_eq!(load_schema(&s.to_json()).unwrap(), s);
        }
    }

    #[test]
    fn order_insensitive_loading() {
        let mut doc = builtin::food().to_document();
        doc.slot_types.reverse();
        doc.relation_types.reverse();
        doc.pair_relations.reverse();
        assert_eq!(DomainSchema::from_document(doc).unwrap(), builtin::food());
    }

    proptest::proptest! {
        #[test]
        fn symmetric_for_all_declared_pairs(i in 0usize..7, j in 0usize..7) {
            for s in [builtin::food(), builtin::gaming(), builtin::stocks()] {
                let slots: Vec<&str> = s.slot_types().collect();
                let a = slots[i % slots.len()];
                let b = slots[j % slots.len()];
                proptest::prop_assert_eq!(
                    s.relation_for_pair(a, b).unwrap(),
                    s.relation_for_pair(b, a).unwrap()
                );
            }
        }
    }
}
