use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::metrics::{bucket_by_slot_count, pair_type_scores, relation_scores, span_relation_scores, CorpusAssignments, MetricsReport};
use super::{EvalError, SplitSpec};
use crate::annotation::AnnotatedUtterance;
use crate::datagen::{make_zero_shot_split, Corpus, HeldOut};
use crate::logic::{compile_relation_based, compile_slot_based, operations_exact_match, ComparatorLexicon, OperationSet};
use crate::relex::{
    train_pair_classifier, ExtractorKind, HeuristicExtractor, LearnedExtractor, PairTrainConfig, RelationAssignment,
    RelationExtractor,
};
use crate::schema::DomainSchema;
use crate::slotfill::{train_tagger, TaggerConfig, TaggerModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    /// Tag slots with a tagger trained on the training split instead of
    /// using gold slots.
    pub end_to_end: bool,
    pub schema_mask: bool,
    pub pair_epochs: usize,
    pub tagger_epochs: usize,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            end_to_end: false,
            schema_mask: true,
            pair_epochs: PairTrainConfig::default().epochs,
            tagger_epochs: TaggerConfig::default().epochs,
        }
    }
}

fn predict_all(
    extractor: &dyn RelationExtractor,
    test: &[AnnotatedUtterance],
) -> Result<Vec<AnnotatedUtterance>, EvalError> {
    test.iter().map(|u| extractor.annotate(u).map_err(EvalError::from)).collect()
}

/// Trains what `kind` needs on `train`, predicts on `test` and scores.
pub fn run_on_split(
    train: &[AnnotatedUtterance],
    test: &[AnnotatedUtterance],
    kind: ExtractorKind,
    schema: &DomainSchema,
    options: &ExperimentOptions,
    seed: u64,
) -> Result<MetricsReport, EvalError> {
    let model = match kind {
        ExtractorKind::Learned => Some(train_pair_classifier(
            train,
            schema,
            &PairTrainConfig { seed, epochs: options.pair_epochs, schema_mask: options.schema_mask },
        )?),
        ExtractorKind::Heuristic => None,
    };
    let heuristic = HeuristicExtractor { schema };
    let learned = model.as_ref().map(|model| LearnedExtractor { model, schema, schema_mask: options.schema_mask });
    let extractor: &dyn RelationExtractor = match &learned {
        Some(l) => l,
        None => &heuristic,
    };

    if options.end_to_end {
        let tagger = train_tagger(train, &TaggerConfig { seed, epochs: options.tagger_epochs })?;
        let tagged: Vec<AnnotatedUtterance> =
            test.iter().map(|u| u.with_slots(tagger.tag_tokens(&u.tokens))).collect();
        let pred = predict_all(extractor, &tagged)?;
        let mut report = span_relation_scores(test, &pred)?.report();
        let mut buckets: BTreeMap<usize, (Vec<AnnotatedUtterance>, Vec<AnnotatedUtterance>)> = BTreeMap::new();
        for (g, p) in test.iter().zip(pred) {
            let e = buckets.entry(g.slots.len()).or_default();
            e.0.push(g.clone());
            e.1.push(p);
        }
        for (n, (g, p)) in buckets {
            report.buckets.insert(n, span_relation_scores(&g, &p)?.bucket());
        }
        return Ok(report);
    }

    let gold: CorpusAssignments = test.iter().map(|u| (u.id.clone(), RelationAssignment::from_gold(u))).collect();
    let pred: CorpusAssignments = test
        .iter()
        .map(|u| Ok((u.id.clone(), extractor.extract_utterance(u)?)))
        .collect::<Result<_, EvalError>>()?;
    let mut report = relation_scores(&gold, &pred)?;
    report.buckets = bucket_by_slot_count(test, &gold, &pred)?;
    Ok(report)
}

/// Splits `pool` per `spec`, then [`run_on_split`] with the split seed.
pub fn run_experiment(
    spec: &SplitSpec,
    kind: ExtractorKind,
    pool: &[AnnotatedUtterance],
    schema: &DomainSchema,
    options: &ExperimentOptions,
) -> Result<MetricsReport, EvalError> {
    let (train, test) = spec.apply(pool)?;
    let mut report = run_on_split(&train, &test, kind, schema, options, spec.seed)?;
    report.spec = Some(spec.clone());
    Ok(report)
}

/// One row of the unseen-slot derivation experiment on stocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationRow {
    pub k: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    /// Operations exact match of the contextual-label pipeline.
    pub slot_based_em: f64,
    /// Operations exact match of the slots-plus-relations pipeline.
    pub relation_based_em: f64,
    /// `negation_relation` F1 of the relations pipeline with tagged slots.
    pub negation_f1: f64,
    /// `negation_relation` F1 with gold slots.
    pub negation_f1_oracle: f64,
}

fn ops_match(gold: &OperationSet, pred: Result<OperationSet, crate::logic::LogicError>) -> bool {
    pred.is_ok_and(|p| operations_exact_match(gold, &p))
}

fn tag_all(model: &TaggerModel, us: &[AnnotatedUtterance]) -> Vec<AnnotatedUtterance> {
    us.iter().map(|u| u.with_slots(model.tag_tokens(&u.tokens))).collect()
}

/// Holds `sector_outside` (negated sectors) out of training except for `k`
/// examples, then runs both end-to-end stocks pipelines on the held-out
/// test utterances.
pub fn zero_shot_derivation(
    corpus: &Corpus,
    schema: &DomainSchema,
    k: usize,
    test_size: usize,
    seed: u64,
    options: &ExperimentOptions,
) -> Result<DerivationRow, EvalError> {
    let sb_by_id = corpus.slot_based_by_id();
    if sb_by_id.is_empty() {
        return Err(EvalError::NotParallel);
    }
    let rb_all = corpus.all();
    let rb_by_id: BTreeMap<&str, &AnnotatedUtterance> = rb_all.iter().map(|u| (u.id.as_str(), u)).collect();
    let sb_all: Vec<AnnotatedUtterance> = rb_all.iter().map(|u| sb_by_id[&u.id].clone()).collect();
    let split = make_zero_shot_split(&sb_all, &HeldOut::slot("sector_outside"), k, test_size, seed)?;
    let project = |us: &[AnnotatedUtterance]| -> Vec<AnnotatedUtterance> {
        us.iter().map(|u| rb_by_id[u.id.as_str()].clone()).collect()
    };
    let (rb_train, rb_test) = (project(&split.train), project(&split.test));
    let lex = ComparatorLexicon::default();
    let gold_ops: Vec<OperationSet> = rb_test
        .iter()
        .map(|u| compile_relation_based(u, &RelationAssignment::from_gold(u), &lex))
        .collect::<Result<_, _>>()?;

    let tagger_cfg = TaggerConfig { seed, epochs: options.tagger_epochs };
    let sb_tagger = train_tagger(&split.train, &tagger_cfg)?;
    let sb_hits = tag_all(&sb_tagger, &split.test)
        .iter()
        .zip(&gold_ops)
        .filter(|(u, g)| ops_match(g, compile_slot_based(u)))
        .count();

    let rb_tagger = train_tagger(&rb_train, &tagger_cfg)?;
    let model = train_pair_classifier(
        &rb_train,
        schema,
        &PairTrainConfig { seed, epochs: options.pair_epochs, schema_mask: options.schema_mask },
    )?;
    let extractor = LearnedExtractor { model: &model, schema, schema_mask: options.schema_mask };
    let pred = predict_all(&extractor, &tag_all(&rb_tagger, &rb_test))?;
    let rb_hits = pred
        .iter()
        .zip(&gold_ops)
        .filter(|(u, g)| ops_match(g, compile_relation_based(u, &RelationAssignment::from_gold(u), &lex)))
        .count();
    let tagged = span_relation_scores(&rb_test, &pred)?;
    let oracle = span_relation_scores(&rb_test, &predict_all(&extractor, &rb_test)?)?;
    let neg = |t: &super::metrics::Tally| t.labels.get("negation_relation").map_or(0.0, |c| c.f1());

    let n = rb_test.len().max(1) as f64;
    Ok(DerivationRow {
        k,
        seed,
        train_size: rb_train.len(),
        test_size: rb_test.len(),
        slot_based_em: sb_hits as f64 / n,
        relation_based_em: rb_hits as f64 / n,
        negation_f1: neg(&tagged),
        negation_f1_oracle: neg(&oracle),
    })
}

/// One row of the unseen-pair generalization experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGeneralizationRow {
    pub pair: (String, String),
    pub k: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    /// F1 on pairs of the held-out slot types only.
    pub pair_f1: f64,
    pub overall: MetricsReport,
}

/// Trains the learned extractor with the `(a, b)` relation seen in only `k`
/// utterances and scores it, with gold slots, on utterances carrying it.
pub fn unseen_pair_generalization(
    pool: &[AnnotatedUtterance],
    schema: &DomainSchema,
    (a, b): (&str, &str),
    k: usize,
    test_size: usize,
    seed: u64,
    options: &ExperimentOptions,
) -> Result<PairGeneralizationRow, EvalError> {
    let split = make_zero_shot_split(pool, &HeldOut::pair(a, b), k, test_size, seed)?;
    let model = train_pair_classifier(
        &split.train,
        schema,
        &PairTrainConfig { seed, epochs: options.pair_epochs, schema_mask: options.schema_mask },
    )?;
    let extractor = LearnedExtractor { model: &model, schema, schema_mask: options.schema_mask };
    let gold: CorpusAssignments =
        split.test.iter().map(|u| (u.id.clone(), RelationAssignment::from_gold(u))).collect();
    let pred: CorpusAssignments = split
        .test
        .iter()
        .map(|u| Ok((u.id.clone(), extractor.extract_utterance(u)?)))
        .collect::<Result<_, EvalError>>()?;
    let mut overall = relation_scores(&gold, &pred)?;
    overall.spec = Some(SplitSpec {
        strategy: super::Strategy::ZeroShotPair { a: a.to_string(), b: b.to_string(), k, test_size },
        seed,
    });
    Ok(PairGeneralizationRow {
        pair: (a.to_string(), b.to_string()),
        k,
        seed,
        train_size: split.train.len(),
        test_size: split.test.len(),
        pair_f1: pair_type_scores(&split.test, &pred, a, b)?.f1(),
        overall,
    })
}
