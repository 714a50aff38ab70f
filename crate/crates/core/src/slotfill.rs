//! Slot filling: gold pass-through and a greedy BIO tagger trained as an
//! averaged perceptron over window features.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::annotation::{tokenize, AnnotatedUtterance, SlotSpan};
use crate::perceptron::{argmax, score, Trainer, WeightMap};

pub const TAGGER_VERSION: u32 = 1;
pub const OUTSIDE: &str = "O";

/// Feature templates, recorded in saved models.
pub const TEMPLATES: &[&str] = &[
    "bias", "w0", "w-1", "w-2", "w+1", "w+2", "shape", "suf3", "prev", "prev|w0", "w-1|w0", "w0|w+1", "dict",
    "prev|dict",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlotFillError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("model uses feature templates {0:?}, expected the built-in set")]
    TemplateMismatch(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    pub version: u32,
    pub seed: u64,
    pub epochs: usize,
    pub templates: Vec<String>,
    /// `O` first, then `B-x`, `I-x` per slot type in sorted order.
    pub labels: Vec<String>,
    pub weights: WeightMap,
    /// Slot types each token carried in the training data.
    pub lexicon: Lexicon,
    /// Token accuracy of the trained model on its own training data.
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaggerConfig {
    pub seed: u64,
    pub epochs: usize,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        Self { seed: 0, epochs: 8 }
    }
}

/// Token to the sorted slot types it was annotated with.
pub type Lexicon = BTreeMap<String, Vec<String>>;

/// Gold slots, unchanged.
pub fn oracle_tag(u: &AnnotatedUtterance) -> Vec<SlotSpan> {
    u.slots.clone()
}

/// BIO tag per token for an utterance's gold slots.
pub fn bio_tags(u: &AnnotatedUtterance) -> Vec<String> {
    let mut tags: Vec<String> = u.tokens.iter().map(|_| OUTSIDE.to_string()).collect();
    for s in &u.slots {
        tags[s.start] = format!("B-{}", s.label);
        for t in &mut tags[s.start + 1..s.end] {
            *t = format!("I-{}", s.label);
        }
    }
    tags
}

/// Character-class shape with runs collapsed, e.g. `2018` -> `d`.
pub fn shape(token: &str) -> String {
    let mut out = String::new();
    for c in token.chars() {
        let k = if c.is_ascii_digit() {
            'd'
        } else if c.is_alphabetic() {
            if c.is_uppercase() { 'X' } else { 'x' }
        } else {
            c
        };
        if !out.ends_with(k) {
            out.push(k);
        }
    }
    out
}

fn build_lexicon(corpus: &[AnnotatedUtterance]) -> Lexicon {
    let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for u in corpus {
        for s in &u.slots {
            for t in &u.tokens[s.start..s.end] {
                map.entry(t.clone()).or_default().insert(s.label.clone());
            }
        }
    }
    map.into_iter().map(|(t, ls)| (t, ls.into_iter().collect())).collect()
}

fn features(tokens: &[String], i: usize, prev: &str, lexicon: &Lexicon) -> Vec<String> {
    let at = |k: isize| -> &str {
        let j = i as isize + k;
        if j < 0 {
            "<s>"
        } else if j as usize >= tokens.len() {
            "</s>"
        } else {
            &tokens[j as usize]
        }
    };
    let w0 = at(0);
    let dict = lexicon.get(w0).map_or(String::from("-"), |ls| ls.join("|"));
    let suffix: String = {
        let chars: Vec<char> = w0.chars().collect();
        chars[chars.len().saturating_sub(3)..].iter().collect()
    };
    alloc::vec![
        String::from("bias"),
        format!("w0={w0}"),
        format!("w-1={}", at(-1)),
        format!("w-2={}", at(-2)),
        format!("w+1={}", at(1)),
        format!("w+2={}", at(2)),
        format!("shape={}", shape(w0)),
        format!("suf3={suffix}"),
        format!("prev={prev}"),
        format!("prev|w0={prev}|{w0}"),
        format!("w-1|w0={}|{w0}", at(-1)),
        format!("w0|w+1={w0}|{}", at(1)),
        format!("dict={dict}"),
        format!("prev|dict={prev}|{dict}"),
    ]
}

/// BIO well-formedness: `I-x` may only follow `B-x` or `I-x`.
fn allowed(label: &str, prev: &str) -> bool {
    match label.strip_prefix("I-") {
        Some(kind) => prev.strip_prefix("B-").or_else(|| prev.strip_prefix("I-")) == Some(kind),
        None => true,
    }
}

fn build_labels(corpus: &[AnnotatedUtterance]) -> Vec<String> {
    let kinds: BTreeSet<&str> = corpus.iter().flat_map(|u| u.slots.iter().map(|s| s.label.as_str())).collect();
    let mut labels = alloc::vec![OUTSIDE.to_string()];
    for k in kinds {
        labels.push(format!("B-{k}"));
        labels.push(format!("I-{k}"));
    }
    labels
}

/// Trains the tagger. Decoding during training is the same constrained
/// greedy pass used at prediction time; sentence order is reshuffled every
/// epoch from `seed`.
pub fn train_tagger(corpus: &[AnnotatedUtterance], config: &TaggerConfig) -> Result<TaggerModel, SlotFillError> {
    if corpus.is_empty() {
        return Err(SlotFillError::EmptyCorpus);
    }
    let labels = build_labels(corpus);
    let lexicon = build_lexicon(corpus);
    let gold: Vec<Vec<usize>> = corpus
        .iter()
        .map(|u| {
            bio_tags(u)
                .iter()
                .map(|t| labels.iter().position(|l| l == t).expect("label set covers corpus"))
                .collect()
        })
        .collect();

    let mut trainer = Trainer::new(labels.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &k in &order {
            let tokens = &corpus[k].tokens;
            let mut prev = OUTSIDE;
            for (i, &truth) in gold[k].iter().enumerate() {
                let ids = trainer.intern_all(&features(tokens, i, prev, &lexicon));
                let scores = trainer.scores(&ids);
                let guess = argmax(&scores, |l| allowed(&labels[l], prev)).unwrap_or(0);
                trainer.update(truth, guess, &ids);
                trainer.tick();
                prev = &labels[guess];
            }
        }
    }

    let mut model = TaggerModel {
        version: TAGGER_VERSION,
        seed: config.seed,
        epochs: config.epochs,
        templates: TEMPLATES.iter().map(|t| t.to_string()).collect(),
        labels,
        weights: trainer.finish(),
        lexicon,
        train_accuracy: 0.0,
    };
    let (mut right, mut total) = (0usize, 0usize);
    for (u, g) in corpus.iter().zip(&gold) {
        let pred = decode(&model, &u.tokens);
        right += pred.iter().zip(g).filter(|(p, g)| p == g).count();
        total += g.len();
    }
    model.train_accuracy = if total == 0 { 1.0 } else { right as f64 / total as f64 };
    Ok(model)
}

fn decode(model: &TaggerModel, tokens: &[String]) -> Vec<usize> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut prev = OUTSIDE;
    for i in 0..tokens.len() {
        let scores = score(&model.weights, model.labels.len(), &features(tokens, i, prev, &model.lexicon));
        let best = argmax(&scores, |l| allowed(&model.labels[l], prev)).unwrap_or(0);
        out.push(best);
        prev = &model.labels[best];
    }
    out
}

impl TaggerModel {
    pub fn check_templates(&self) -> Result<(), SlotFillError> {
        if self.templates.iter().map(String::as_str).eq(TEMPLATES.iter().copied()) {
            Ok(())
        } else {
            Err(SlotFillError::TemplateMismatch(self.templates.clone()))
        }
    }

    /// BIO labels for a token sequence.
    pub fn tag_labels(&self, tokens: &[String]) -> Vec<&str> {
        decode(self, tokens).into_iter().map(|l| self.labels[l].as_str()).collect()
    }

    /// Maximal BIO spans over already tokenized input.
    pub fn tag_tokens(&self, tokens: &[String]) -> Vec<SlotSpan> {
        let tags = self.tag_labels(tokens);
        let mut spans = Vec::new();
        let mut i = 0;
        while i < tags.len() {
            if let Some(kind) = tags[i].strip_prefix("B-") {
                let mut end = i + 1;
                let inside = format!("I-{kind}");
                while end < tags.len() && tags[end] == inside {
                    end += 1;
                }
                spans.push(SlotSpan::new(kind, i, end, tokens).expect("non-empty span"));
                i = end;
            } else {
                i += 1;
            }
        }
        spans
    }
}

/// Tokenizes and tags raw text.
pub fn tag(model: &TaggerModel, text: &str) -> Vec<SlotSpan> {
    model.tag_tokens(&tokenize(text))
}

/// Copies of the corpus with slots replaced by tagger output; relations are
/// dropped.
pub fn tag_corpus(model: &TaggerModel, corpus: &[AnnotatedUtterance]) -> Vec<AnnotatedUtterance> {
    corpus.iter().map(|u| u.with_slots(model.tag_tokens(&u.tokens))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::utterance;
    use crate::fixtures;

    fn toy() -> Vec<AnnotatedUtterance> {
        let locs = ["europe", "asia", "germany", "japan", "france"];
        let mut out = Vec::new();
        for (k, l) in locs.iter().enumerate() {
            out.push(
                utterance(&format!("a{k}"), "stocks", &format!("show me companies in {l}"), &[("location", 4, 5)], &[]).unwrap(),
            );
            out.push(
                utterance(
                    &format!("b{k}"),
                    "stocks",
                    &format!("list companies in north america excluding {l}"),
                    &[("location", 3, 5), ("negation_modifier", 5, 6), ("location", 6, 7)],
                    &[],
                )
                .unwrap(),
            );
        }
        out
    }

    #[test]
    fn bio_tags_of_fixture() {
        let (rb, _) = fixtures::stocks_ebitda();
        let tags = bio_tags(&rb);
        assert_eq!(tags[9], "B-metric_name");
        assert_eq!(tags[10], "I-metric_name");
        assert_eq!(tags[12], "O");
    }

    #[test]
    fn fits_and_tags() {
        let corpus = toy();
        let model = train_tagger(&corpus, &TaggerConfig::default()).unwrap();
        assert_eq!(model.train_accuracy, 1.0);
        let spans = tag(&model, "show me companies in europe");
        assert_eq!(spans.len(), 1);
        assert_eq!((spans[0].label.as_str(), spans[0].value.as_str()), ("location", "europe"));
        assert!(tag(&model, "").is_empty());
        // unseen token still gets a decision
        let spans = tag(&model, "show me companies in atlantis");
        assert!(spans.iter().all(|s| s.end <= 5));
    }

    #[test]
    fn untrained_model_tags_everything_outside() {
        let model = train_tagger(&toy(), &TaggerConfig { seed: 1, epochs: 0 }).unwrap();
        assert!(model.weights.is_empty());
        assert!(tag(&model, "show me companies in europe").is_empty());
    }

    #[test]
    fn deterministic() {
        let cfg = TaggerConfig { seed: 11, epochs: 4 };
        assert_eq!(train_tagger(&toy(), &cfg).unwrap(), train_tagger(&toy(), &cfg).unwrap());
    }

    #[test]
    fn empty_corpus() {
        assert_eq!(train_tagger(&[], &TaggerConfig::default()), Err(SlotFillError::EmptyCorpus));
    }

    #[test]
    fn oracle_is_identity() {
        let u = fixtures::food_burgers();
        assert_eq!(oracle_tag(&u), u.slots);
        assert_eq!(oracle_tag(&u).len(), 5);
        let empty = utterance("e", "food", "hi", &[], &[]).unwrap();
        assert!(oracle_tag(&empty).is_empty());
    }

    #[test]
    fn bio_constraint() {
        assert!(allowed("I-x", "B-x"));
        assert!(allowed("I-x", "I-x"));
        assert!(!allowed("I-x", "O"));
        assert!(!allowed("I-x", "B-y"));
        assert!(allowed("B-y", "I-x"));
        assert_eq!(shape("2018"), "d");
        assert_eq!(shape("market"), "x");
        assert_eq!(shape("q3"), "xd");
    }
}
