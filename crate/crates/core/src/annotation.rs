//! Utterance annotation model: tokens, slot spans, pairwise relations.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::schema::DomainSchema;

pub const BEGIN_SLOT: &str = "BEGIN_SLOT";
pub const END_SLOT: &str = "END_SLOT";

const PUNCTUATION: &[char] = &['.', ',', '?', '!', '\'', ';', ':'];

/// Lowercases, splits on whitespace and breaks `.,?!';:` out as their own
/// tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        let lower = word.to_lowercase();
        let mut current = String::new();
        for c in lower.chars() {
            if PUNCTUATION.contains(&c) {
                if !current.is_empty() {
                    tokens.push(core::mem::take(&mut current));
                }
                tokens.push(c.to_string());
            } else {
                current.push(c);
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}

/// A labeled token range `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotSpan {
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub value: String,
}

impl SlotSpan {
    /// Builds a span over `tokens`; `None` when the range is empty or out of
    /// bounds.
    pub fn new(label: impl Into<String>, start: usize, end: usize, tokens: &[String]) -> Option<Self> {
        if start >= end || end > tokens.len() {
            return None;
        }
        Some(Self {
            label: label.into(),
            start,
            end,
            value: tokens[start..end].join(" "),
        })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Tokens strictly between two non-overlapping spans.
    pub fn gap(&self, other: &SlotSpan) -> usize {
        other
            .start
            .checked_sub(self.end)
            .or_else(|| self.start.checked_sub(other.end))
            .unwrap_or(0)
    }
}

/// Unordered slot-index pair stored canonically with `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotPair {
    first: usize,
    second: usize,
}

impl SlotPair {
    /// Canonicalizes `(a, b)`; `None` for a self-pair.
    pub fn new(a: usize, b: usize) -> Option<Self> {
        match a.cmp(&b) {
            core::cmp::Ordering::Less => Some(Self { first: a, second: b }),
            core::cmp::Ordering::Greater => Some(Self { first: b, second: a }),
            core::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(self) -> usize {
        self.first
    }

    pub fn second(self) -> usize {
        self.second
    }
}

impl fmt::Display for SlotPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

/// All unordered index pairs over `count` slots, in lexicographic order.
pub fn enumerate_slot_pairs(count: usize) -> Vec<SlotPair> {
    let mut pairs = Vec::with_capacity(count * count.saturating_sub(1) / 2);
    for i in 0..count {
        for j in i + 1..count {
            pairs.push(SlotPair { first: i, second: j });
        }
    }
    pairs
}

/// Ordered slot labels of an utterance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlotPattern(pub Vec<String>);

impl SlotPattern {
    pub fn from_slots(slots: &[SlotSpan]) -> Self {
        Self(slots.iter().map(|s| s.label.clone()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SlotPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(" "))
    }
}

// -- wire records -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub label: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub a: usize,
    pub b: usize,
    pub label: String,
}

/// One line of a corpus file. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtteranceRecord {
    pub id: String,
    pub domain: String,
    pub text: String,
    pub intent: Option<String>,
    pub slots: Vec<SlotRecord>,
    pub relations: Vec<RelationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnnotationError {
    #[error("utterance {id}: {violation}")]
    Invalid { id: String, violation: Violation },
    #[error("slot pair ({0},{1}) is out of range for {2} slots")]
    PairOutOfRange(usize, usize, usize),
}

/// A slot-annotated utterance with its non-`None` relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedUtterance {
    pub id: String,
    pub domain: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub intent: Option<String>,
    pub slots: Vec<SlotSpan>,
    pub relations: BTreeMap<SlotPair, String>,
}

impl AnnotatedUtterance {
    /// Builds an utterance from its wire record. Structural problems (bad
    /// spans, overlaps, self or duplicate relations) are errors; schema
    /// checks are left to [`validate`].
    pub fn from_record(record: UtteranceRecord) -> Result<Self, AnnotationError> {
        let structural = structural_violations(&record);
        if let Some(violation) = structural.into_iter().next() {
            return Err(AnnotationError::Invalid { id: record.id, violation });
        }
        let tokens = tokenize(&record.text);
        let slots = record
            .slots
            .iter()
            .map(|s| SlotSpan::new(s.label.clone(), s.start, s.end, &tokens).expect("checked"))
            .collect();
        let relations = record
            .relations
            .into_iter()
            .map(|r| (SlotPair::new(r.a, r.b).expect("checked"), r.label))
            .collect();
        Ok(Self {
            id: record.id,
            domain: record.domain,
            text: record.text,
            tokens,
            intent: record.intent,
            slots,
            relations,
        })
    }

    /// Canonical record: relations sorted by pair.
    pub fn to_record(&self) -> UtteranceRecord {
        UtteranceRecord {
            id: self.id.clone(),
            domain: self.domain.clone(),
            text: self.text.clone(),
            intent: self.intent.clone(),
            slots: self
                .slots
                .iter()
                .map(|s| SlotRecord {
                    label: s.label.clone(),
                    start: s.start,
                    end: s.end,
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|(p, l)| RelationRecord {
                    a: p.first,
                    b: p.second,
                    label: l.clone(),
                })
                .collect(),
        }
    }

    pub fn slot_pairs(&self) -> Vec<SlotPair> {
        enumerate_slot_pairs(self.slots.len())
    }

    pub fn slot_pattern(&self) -> SlotPattern {
        SlotPattern::from_slots(&self.slots)
    }

    pub fn relation(&self, pair: SlotPair) -> Option<&str> {
        self.relations.get(&pair).map(String::as_str)
    }

    /// Same text and tokens with different slots; relations are dropped.
    pub fn with_slots(&self, slots: Vec<SlotSpan>) -> Self {
        Self {
            slots,
            relations: BTreeMap::new(),
            ..self.clone()
        }
    }

    pub fn validate(&self, schema: &DomainSchema) -> Vec<Violation> {
        validate(&self.to_record(), schema)
    }
}

/// Convenience for the label and pattern of an utterance.
pub fn slot_pattern(u: &AnnotatedUtterance) -> SlotPattern {
    u.slot_pattern()
}

// -- validation -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptySpan { slot: usize },
    SpanOutOfRange { slot: usize, end: usize, tokens: usize },
    Overlap { first: usize, second: usize },
    Unsorted { slot: usize },
    UnknownSlotLabel { slot: usize, label: String },
    SelfRelation { slot: usize },
    RelationIndexOutOfRange { a: usize, b: usize },
    DuplicateRelation { a: usize, b: usize },
    RelationNotInSchema { a: usize, b: usize, label: String },
    DomainMismatch { expected: String, found: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySpan { slot } => write!(f, "slot {slot} has an empty span"),
            Violation::SpanOutOfRange { slot, end, tokens } => {
                write!(f, "slot {slot} ends at {end} but there are {tokens} tokens")
            }
            Violation::Overlap { first, second } => write!(f, "slots {first} and {second} overlap"),
            Violation::Unsorted { slot } => write!(f, "slot {slot} starts before its predecessor"),
            Violation::UnknownSlotLabel { slot, label } => {
                write!(f, "slot {slot} has undeclared label `{label}`")
            }
            Violation::SelfRelation { slot } => write!(f, "relation from slot {slot} to itself"),
            Violation::RelationIndexOutOfRange { a, b } => {
                write!(f, "relation ({a},{b}) refers to a missing slot")
            }
            Violation::DuplicateRelation { a, b } => write!(f, "pair ({a},{b}) has more than one relation"),
            Violation::RelationNotInSchema { a, b, label } => {
                write!(f, "relation `{label}` on pair ({a},{b}) is not in the schema")
            }
            Violation::DomainMismatch { expected, found } => {
                write!(f, "domain `{found}` does not match schema `{expected}`")
            }
        }
    }
}

fn structural_violations(record: &UtteranceRecord) -> Vec<Violation> {
    let ntok = tokenize(&record.text).len();
    let mut out = Vec::new();
    for (i, s) in record.slots.iter().enumerate() {
        if s.start >= s.end {
            out.push(Violation::EmptySpan { slot: i });
        } else if s.end > ntok {
            out.push(Violation::SpanOutOfRange { slot: i, end: s.end, tokens: ntok });
        }
        if i > 0 {
            let prev = &record.slots[i - 1];
            if s.start < prev.start {
                out.push(Violation::Unsorted { slot: i });
            }
        }
    }
    for i in 0..record.slots.len() {
        for j in i + 1..record.slots.len() {
            let (a, b) = (&record.slots[i], &record.slots[j]);
            if a.start < b.end && b.start < a.end {
                out.push(Violation::Overlap { first: i, second: j });
            }
        }
    }
    let mut seen = BTreeMap::new();
    for r in &record.relations {
        if r.a == r.b {
            out.push(Violation::SelfRelation { slot: r.a });
            continue;
        }
        if r.a >= record.slots.len() || r.b >= record.slots.len() {
            out.push(Violation::RelationIndexOutOfRange { a: r.a, b: r.b });
            continue;
        }
        let pair = SlotPair::new(r.a, r.b).expect("distinct");
        if seen.insert(pair, ()).is_some() {
            out.push(Violation::DuplicateRelation { a: pair.first, b: pair.second });
        }
    }
    out
}

/// Reports every structural and schema violation of a record. Violations are
/// data: an empty list means the record is valid.
pub fn validate(record: &UtteranceRecord, schema: &DomainSchema) -> Vec<Violation> {
    let mut out = Vec::new();
    if record.domain != schema.domain() {
        out.push(Violation::DomainMismatch {
            expected: schema.domain().to_string(),
            found: record.domain.clone(),
        });
    }
    for (i, s) in record.slots.iter().enumerate() {
        if !schema.has_slot_type(&s.label) {
            out.push(Violation::UnknownSlotLabel { slot: i, label: s.label.clone() });
        }
    }
    out.extend(structural_violations(record));
    for r in &record.relations {
        if r.a == r.b || r.a >= record.slots.len() || r.b >= record.slots.len() {
            continue;
        }
        let (la, lb) = (&record.slots[r.a].label, &record.slots[r.b].label);
        let allowed = if schema.has_slot_type(la) && schema.has_slot_type(lb) {
            schema.pair_relation_unchecked(la, lb)
        } else {
            None
        };
        if allowed != Some(r.label.as_str()) {
            let pair = SlotPair::new(r.a, r.b).expect("distinct");
            out.push(Violation::RelationNotInSchema {
                a: pair.first,
                b: pair.second,
                label: r.label.clone(),
            });
        }
    }
    out
}

// -- pair encoding ----------------------------------------------------------

/// Token sequence with markers around the two slots of a pair:
/// `label BEGIN_SLOT tokens.. END_SLOT label` for each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairEncoding {
    pub tokens: Vec<String>,
    pub pair: SlotPair,
    /// Positions (in `tokens`) of the eight inserted marker and label tokens.
    pub inserted: [usize; 8],
    /// Labels and original-coordinate spans of every slot in the utterance.
    pub slot_labels: Vec<String>,
    pub slot_spans: Vec<(usize, usize)>,
}

impl PairEncoding {
    /// Removes the inserted tokens, recovering the original sequence.
    pub fn original_tokens(&self) -> Vec<String> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.inserted.contains(i))
            .map(|(_, t)| t.clone())
            .collect()
    }

    /// Maps an index in the original token list to its index in `tokens`.
    pub fn encoded_index(&self, original: usize) -> usize {
        let (a, b) = (self.slot_spans[self.pair.first], self.slot_spans[self.pair.second]);
        let shift = if original < a.0 {
            0
        } else if original < a.1 {
            2
        } else if original < b.0 {
            4
        } else if original < b.1 {
            6
        } else {
            8
        };
        original + shift
    }

    pub fn original_len(&self) -> usize {
        self.tokens.len() - 8
    }
}

pub fn encode_pair(u: &AnnotatedUtterance, pair: SlotPair) -> Result<PairEncoding, AnnotationError> {
    encode_slots(&u.tokens, &u.slots, pair)
}

pub(crate) fn encode_slots(
    tokens: &[String],
    slots: &[SlotSpan],
    pair: SlotPair,
) -> Result<PairEncoding, AnnotationError> {
    if pair.second >= slots.len() {
        return Err(AnnotationError::PairOutOfRange(pair.first, pair.second, slots.len()));
    }
    let (a, b) = (&slots[pair.first], &slots[pair.second]);
    let mut out = Vec::with_capacity(tokens.len() + 8);
    let mut inserted = [0usize; 8];
    let mut k = 0;
    for (i, tok) in tokens.iter().enumerate() {
        for s in [a, b] {
            if i == s.start {
                inserted[k] = out.len();
                out.push(s.label.clone());
                inserted[k + 1] = out.len();
                out.push(BEGIN_SLOT.to_string());
                k += 2;
            }
        }
        out.push(tok.clone());
        for s in [a, b] {
            if i + 1 == s.end {
                inserted[k] = out.len();
                out.push(END_SLOT.to_string());
                inserted[k + 1] = out.len();
                out.push(s.label.clone());
                k += 2;
            }
        }
    }
    debug_assert_eq!(k, 8);
    Ok(PairEncoding {
        tokens: out,
        pair,
        inserted,
        slot_labels: slots.iter().map(|s| s.label.clone()).collect(),
        slot_spans: slots.iter().map(|s| (s.start, s.end)).collect(),
    })
}

/// Helper for tests and fixtures: an utterance from text plus
/// `(label, start, end)` slots and `(a, b, label)` relations.
pub fn utterance(
    id: &str,
    domain: &str,
    text: &str,
    slots: &[(&str, usize, usize)],
    relations: &[(usize, usize, &str)],
) -> Result<AnnotatedUtterance, AnnotationError> {
    AnnotatedUtterance::from_record(UtteranceRecord {
        id: id.to_string(),
        domain: domain.to_string(),
        text: text.to_string(),
        intent: None,
        slots: slots
            .iter()
            .map(|&(l, s, e)| SlotRecord { label: l.to_string(), start: s, end: e })
            .collect(),
        relations: relations
            .iter()
            .map(|&(a, b, l)| RelationRecord { a, b, label: l.to_string() })
            .collect(),
    })
}
