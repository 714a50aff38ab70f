use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ensure_known, pair_features, pair_labels, RelationAssignment, RelexError};
use crate::annotation::{encode_slots, AnnotatedUtterance, SlotSpan};
use crate::perceptron::{argmax, score, Trainer, WeightMap};
use crate::schema::DomainSchema;

pub const NONE_LABEL: &str = "None";
pub const MODEL_VERSION: u32 = 1;

/// Linear multiclass classifier over pair-encoding features.
#[derive(Debug, Clone, PartialEq)]
pub struct PairClassifierModel {
    pub version: u32,
    pub domain: String,
    pub seed: u64,
    pub epochs: usize,
    /// Whether schema masking was applied while training.
    pub schema_mask: bool,
    /// Relation labels in sorted order with `None` last.
    pub labels: Vec<String>,
    pub weights: WeightMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairTrainConfig {
    pub seed: u64,
    pub epochs: usize,
    pub schema_mask: bool,
}

impl Default for PairTrainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            epochs: 12,
            schema_mask: true,
        }
    }
}

impl PairClassifierModel {
    fn none_index(&self) -> usize {
        self.labels.len() - 1
    }

    fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

struct Instance {
    features: Vec<usize>,
    gold: usize,
    candidate: Option<usize>,
}

fn allowed_fn(mask: bool, candidate: Option<usize>, none: usize) -> impl Fn(usize) -> bool {
    move |l| !mask || l == none || Some(l) == candidate
}

/// Trains on one instance per enumerated slot pair (gold label or `None`),
/// visiting instances in a seeded shuffled order each epoch.
pub fn train_pair_classifier(
    corpus: &[AnnotatedUtterance],
    schema: &DomainSchema,
    config: &PairTrainConfig,
) -> Result<PairClassifierModel, RelexError> {
    if corpus.is_empty() {
        return Err(RelexError::EmptyCorpus);
    }
    let mut labels: Vec<String> = schema.relation_types().map(ToString::to_string).collect();
    labels.push(NONE_LABEL.to_string());
    let mut model = PairClassifierModel {
        version: MODEL_VERSION,
        domain: schema.domain().to_string(),
        seed: config.seed,
        epochs: config.epochs,
        schema_mask: config.schema_mask,
        labels,
        weights: WeightMap::new(),
    };
    let none = model.none_index();

    let mut trainer = Trainer::new(model.labels.len());
    let mut instances = Vec::new();
    for u in corpus {
        ensure_known(&u.slots, schema)?;
        for pair in u.slot_pairs() {
            let enc = encode_slots(&u.tokens, &u.slots, pair).expect("enumerated pair");
            let feats = pair_features(&enc, schema);
            let gold = match u.relation(pair) {
                Some(l) => model.label_index(l).ok_or_else(|| RelexError::UnknownSlot(l.to_string()))?,
                None => none,
            };
            let (a, b) = pair_labels(&u.slots, pair);
            let candidate = schema.pair_relation_unchecked(a, b).and_then(|l| model.label_index(l));
            instances.push(Instance {
                features: trainer.intern_all(&feats),
                gold,
                candidate,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..instances.len()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &k in &order {
            let inst = &instances[k];
            let scores = trainer.scores(&inst.features);
            let guess = argmax(&scores, allowed_fn(config.schema_mask, inst.candidate, none)).unwrap_or(none);
            trainer.update(inst.gold, guess, &inst.features);
            trainer.tick();
        }
    }
    model.weights = trainer.finish();
    Ok(model)
}

/// Classifies every enumerated pair of the utterance's slots with the schema
/// mask on.
pub fn extract_learned(
    model: &PairClassifierModel,
    u: &AnnotatedUtterance,
    schema: &DomainSchema,
) -> Result<RelationAssignment, RelexError> {
    extract_slots(model, &u.tokens, &u.slots, schema, true)
}

pub(crate) fn extract_slots(
    model: &PairClassifierModel,
    tokens: &[String],
    slots: &[SlotSpan],
    schema: &DomainSchema,
    mask: bool,
) -> Result<RelationAssignment, RelexError> {
    if model.epochs == 0 || model.labels.is_empty() {
        return Err(RelexError::Untrained);
    }
    if model.domain != schema.domain() {
        return Err(RelexError::DomainMismatch {
            model: model.domain.clone(),
            schema: schema.domain().to_string(),
        });
    }
    ensure_known(slots, schema)?;
    let none = model.none_index();
    let mut out = RelationAssignment::all_none(slots.len());
    let pairs: Vec<_> = out.pairs().collect();
    for pair in pairs {
        let enc = encode_slots(tokens, slots, pair).expect("enumerated pair");
        let feats = pair_features(&enc, schema);
        let scores = score(&model.weights, model.labels.len(), &feats);
        let (a, b) = pair_labels(slots, pair);
        let candidate = schema.pair_relation_unchecked(a, b).and_then(|l| model.label_index(l));
        let best = argmax(&scores, allowed_fn(mask, candidate, none)).unwrap_or(none);
        if best != none {
            out.set(pair, Some(model.labels[best].clone()));
        }
    }
    Ok(out)
}
