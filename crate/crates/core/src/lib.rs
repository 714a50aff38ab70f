//! Relation extraction for modular slot-filling NLU.
//!
//! Slots come from a tagger (or gold annotation); a relation extractor then
//! labels every slot pair, and for the stocks domain the slots and relations
//! compile into back-end operations. The crate is `no_std` with `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod annotation;
pub mod datagen;
pub mod eval;
pub mod fixtures;
pub mod logic;
pub mod perceptron;
pub mod relex;
pub mod schema;
pub mod slotfill;

pub use annotation::{AnnotatedUtterance, SlotPair, SlotPattern, SlotSpan};
pub use relex::{RelationAssignment, RelationExtractor};
pub use schema::DomainSchema;
