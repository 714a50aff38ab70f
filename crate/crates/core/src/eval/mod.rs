//! Relation metrics, train/test splits and experiment drivers.
//!
//! Scores are micro-averaged over non-`None` labels from integer confusion
//! counts, so aggregation is order independent. Exact match is taken over
//! the full pairwise assignment of every utterance.

mod experiment;
mod metrics;
mod split;

pub use experiment::{
    run_experiment, run_on_split, unseen_pair_generalization, zero_shot_derivation, DerivationRow,
    ExperimentOptions, PairGeneralizationRow,
};
pub use metrics::{
    aggregate, bucket_by_slot_count, f1, pair_type_scores, relation_scores, span_relation_scores, AggregateReport,
    BucketReport, Confusion, CorpusAssignments, Counts, LabelScores, MetricsReport, Scores, Spread, Tally,
};
pub use split::{pattern_split, pattern_split_with, random_split, SplitSpec, Strategy, DEFAULT_TEST_FRACTION};

use alloc::string::String;

use crate::datagen::DatagenError;
use crate::logic::LogicError;
use crate::relex::RelexError;
use crate::slotfill::SlotFillError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("utterance ids differ between gold and prediction (first: `{0}`)")]
    IdMismatch(String),
    #[error("pair sets differ for utterance `{0}`")]
    PairMismatch(String),
    #[error("pattern split needs at least two distinct slot patterns, found {0}")]
    TooFewPatterns(usize),
    #[error("invalid split: {0}")]
    InvalidSplit(&'static str),
    #[error("corpus has no parallel slot-based annotation")]
    NotParallel,
    #[error(transparent)]
    Relex(#[from] RelexError),
    #[error(transparent)]
    SlotFill(#[from] SlotFillError),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[cfg(test)]
mod tests;
