//! Relation extraction over slot pairs.
//!
//! Every extractor maps the slots of one utterance to a total
//! [`RelationAssignment`]: each enumerated slot pair gets a relation label or
//! `None`. Two engines are provided: the rule-driven nearest-candidate
//! heuristic and a learned linear classifier over pair encodings.

mod classifier;
mod features;
mod heuristic;

use alloc::collections::BTreeMap;
use alloc::string::String;

pub use classifier::{
    extract_learned, train_pair_classifier, PairClassifierModel, PairTrainConfig, MODEL_VERSION, NONE_LABEL,
};
pub use features::{distance_bucket, pair_features, PAIR_TEMPLATES};
pub use heuristic::heuristic_extract;

use crate::annotation::{enumerate_slot_pairs, AnnotatedUtterance, SlotPair, SlotSpan};
use crate::schema::DomainSchema;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelexError {
    #[error("slot label `{0}` is not declared in the schema")]
    UnknownSlot(String),
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("pair classifier has not been trained")]
    Untrained,
    #[error("model was trained for domain `{model}` but the schema is `{schema}`")]
    DomainMismatch { model: String, schema: String },
}

/// Relation label (or `None`) for every enumerated slot pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationAssignment {
    labels: BTreeMap<SlotPair, Option<String>>,
}

impl RelationAssignment {
    /// All pairs over `slot_count` slots set to `None`.
    pub fn all_none(slot_count: usize) -> Self {
        Self {
            labels: enumerate_slot_pairs(slot_count).into_iter().map(|p| (p, None)).collect(),
        }
    }

    /// The gold assignment implied by an utterance's stored relations.
    pub fn from_gold(u: &AnnotatedUtterance) -> Self {
        let mut a = Self::all_none(u.slots.len());
        for (pair, label) in &u.relations {
            a.labels.insert(*pair, Some(label.clone()));
        }
        a
    }

    pub fn set(&mut self, pair: SlotPair, label: Option<String>) {
        self.labels.insert(pair, label);
    }

    pub fn get(&self, pair: SlotPair) -> Option<&str> {
        self.labels.get(&pair).and_then(|l| l.as_deref())
    }

    pub fn contains_pair(&self, pair: SlotPair) -> bool {
        self.labels.contains_key(&pair)
    }

    pub fn pairs(&self) -> impl Iterator<Item = SlotPair> + '_ {
        self.labels.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SlotPair, Option<&str>)> {
        self.labels.iter().map(|(p, l)| (*p, l.as_deref()))
    }

    /// Non-`None` entries in pair order.
    pub fn relations(&self) -> impl Iterator<Item = (SlotPair, &str)> {
        self.labels
            .iter()
            .filter_map(|(p, l)| l.as_deref().map(|l| (*p, l)))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Stored form: only non-`None` labels.
    pub fn into_relations(self) -> BTreeMap<SlotPair, String> {
        self.labels.into_iter().filter_map(|(p, l)| l.map(|l| (p, l))).collect()
    }

    pub fn same_pairs(&self, other: &Self) -> bool {
        self.labels.len() == other.labels.len() && self.labels.keys().eq(other.labels.keys())
    }
}

/// Common contract of relation extractors.
pub trait RelationExtractor {
    fn extract(&self, tokens: &[String], slots: &[SlotSpan]) -> Result<RelationAssignment, RelexError>;

    /// Extracts over an utterance's own slots.
    fn extract_utterance(&self, u: &AnnotatedUtterance) -> Result<RelationAssignment, RelexError> {
        self.extract(&u.tokens, &u.slots)
    }

    /// Copies the utterance with its relations replaced by the prediction.
    fn annotate(&self, u: &AnnotatedUtterance) -> Result<AnnotatedUtterance, RelexError> {
        let assignment = self.extract_utterance(u)?;
        let mut out = u.clone();
        out.relations = assignment.into_relations();
        Ok(out)
    }
}

/// Rule-based extractor.
#[derive(Debug, Clone, Copy)]
pub struct HeuristicExtractor<'a> {
    pub schema: &'a DomainSchema,
}

impl RelationExtractor for HeuristicExtractor<'_> {
    fn extract(&self, _tokens: &[String], slots: &[SlotSpan]) -> Result<RelationAssignment, RelexError> {
        heuristic_extract(slots, self.schema)
    }
}

/// Learned pairwise extractor; `schema_mask` removes labels the schema rules
/// out for a pair's slot types.
#[derive(Debug, Clone, Copy)]
pub struct LearnedExtractor<'a> {
    pub model: &'a PairClassifierModel,
    pub schema: &'a DomainSchema,
    pub schema_mask: bool,
}

impl RelationExtractor for LearnedExtractor<'_> {
    fn extract(&self, tokens: &[String], slots: &[SlotSpan]) -> Result<RelationAssignment, RelexError> {
        classifier::extract_slots(self.model, tokens, slots, self.schema, self.schema_mask)
    }
}

/// Extractor choice for experiment drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorKind {
    Heuristic,
    Learned,
}

impl ExtractorKind {
    pub fn name(self) -> &'static str {
        match self {
            ExtractorKind::Heuristic => "heuristic",
            ExtractorKind::Learned => "learned",
        }
    }
}

pub(crate) fn ensure_known(slots: &[SlotSpan], schema: &DomainSchema) -> Result<(), RelexError> {
    match slots.iter().find(|s| !schema.has_slot_type(&s.label)) {
        Some(s) => Err(RelexError::UnknownSlot(s.label.clone())),
        None => Ok(()),
    }
}

/// Slot-type pair of a slot pair, in slot order.
pub(crate) fn pair_labels(slots: &[SlotSpan], pair: SlotPair) -> (&str, &str) {
    (&slots[pair.first()].label, &slots[pair.second()].label)
}
