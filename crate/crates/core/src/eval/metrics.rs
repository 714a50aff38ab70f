use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{EvalError, SplitSpec};
use crate::annotation::{AnnotatedUtterance, SlotSpan};
use crate::relex::RelationAssignment;

/// Relation assignments of a corpus keyed by utterance id.
pub type CorpusAssignments = BTreeMap<String, RelationAssignment>;

/// Integer confusion counts for one label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }

    fn add(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean, 0 when both are 0.
pub fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
    pub em: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub utterances: usize,
    pub exact_matches: usize,
    pub gold_relations: usize,
    pub predicted_relations: usize,
    pub true_positives: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelScores {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketReport {
    pub overall: Scores,
    pub counts: Counts,
}

/// Micro scores over non-`None` labels plus exact match over whole
/// utterances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SplitSpec>,
    pub overall: Scores,
    pub per_label: BTreeMap<String, LabelScores>,
    #[serde(default)]
    pub buckets: BTreeMap<usize, BucketReport>,
    pub counts: Counts,
}

impl MetricsReport {
    pub fn f1(&self) -> f64 {
        self.overall.f1
    }

    pub fn exact_match(&self) -> f64 {
        self.overall.em
    }

    /// F1 of one label, 0 when the label never occurs.
    pub fn label_f1(&self, label: &str) -> f64 {
        self.per_label.get(label).map_or(0.0, |s| s.f1)
    }
}

/// Order-independent accumulator of confusion counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub labels: BTreeMap<String, Confusion>,
    pub utterances: usize,
    pub exact: usize,
}

impl Tally {
    /// Records one pair: gold and predicted labels, `None` meaning no
    /// relation.
    pub fn pair(&mut self, gold: Option<&str>, pred: Option<&str>) {
        if let Some(p) = pred {
            let c = self.labels.entry(p.to_string()).or_default();
            if pred == gold {
                c.tp += 1;
            } else {
                c.fp += 1;
            }
        }
        if let Some(g) = gold {
            if pred != gold {
                self.labels.entry(g.to_string()).or_default().fn_ += 1;
            }
        }
    }

    pub fn utterance(&mut self, exact: bool) {
        self.utterances += 1;
        self.exact += exact as usize;
    }

    pub fn micro(&self) -> Confusion {
        let mut total = Confusion::default();
        for c in self.labels.values() {
            total.add(c);
        }
        total
    }

    pub fn merge(&mut self, other: &Tally) {
        for (l, c) in &other.labels {
            self.labels.entry(l.clone()).or_default().add(c);
        }
        self.utterances += other.utterances;
        self.exact += other.exact;
    }

    fn scores_and_counts(&self) -> (Scores, Counts) {
        let m = self.micro();
        (
            Scores {
                p: m.precision(),
                r: m.recall(),
                f1: m.f1(),
                em: ratio(self.exact, self.utterances),
            },
            Counts {
                utterances: self.utterances,
                exact_matches: self.exact,
                gold_relations: m.tp + m.fn_,
                predicted_relations: m.tp + m.fp,
                true_positives: m.tp,
            },
        )
    }

    pub fn report(&self) -> MetricsReport {
        let (overall, counts) = self.scores_and_counts();
        MetricsReport {
            spec: None,
            overall,
            per_label: self
                .labels
                .iter()
                .map(|(l, c)| {
                    let s = LabelScores { p: c.precision(), r: c.recall(), f1: c.f1(), tp: c.tp, fp: c.fp, fn_: c.fn_ };
                    (l.clone(), s)
                })
                .collect(),
            buckets: BTreeMap::new(),
            counts,
        }
    }

    pub fn bucket(&self) -> BucketReport {
        let (overall, counts) = self.scores_and_counts();
        BucketReport { overall, counts }
    }
}

fn tally_assignment(t: &mut Tally, id: &str, gold: &RelationAssignment, pred: &RelationAssignment) -> Result<(), EvalError> {
    if !gold.same_pairs(pred) {
        return Err(EvalError::PairMismatch(id.to_string()));
    }
    for (pair, g) in gold.iter() {
        t.pair(g, pred.get(pair));
    }
    t.utterance(gold == pred);
    Ok(())
}

fn check_ids(gold: &CorpusAssignments, pred: &CorpusAssignments) -> Result<(), EvalError> {
    if let Some(id) = gold.keys().find(|k| !pred.contains_key(*k)) {
        return Err(EvalError::IdMismatch(id.clone()));
    }
    if let Some(id) = pred.keys().find(|k| !gold.contains_key(*k)) {
        return Err(EvalError::IdMismatch(id.clone()));
    }
    Ok(())
}

/// Scores predicted assignments against gold over identical ids and pairs.
pub fn relation_scores(gold: &CorpusAssignments, pred: &CorpusAssignments) -> Result<MetricsReport, EvalError> {
    check_ids(gold, pred)?;
    let mut t = Tally::default();
    for (id, g) in gold {
        tally_assignment(&mut t, id, g, &pred[id])?;
    }
    Ok(t.report())
}

/// Per-slot-count reports; the slot count of each id comes from `corpus`.
/// Empty buckets are absent.
pub fn bucket_by_slot_count(
    corpus: &[AnnotatedUtterance],
    gold: &CorpusAssignments,
    pred: &CorpusAssignments,
) -> Result<BTreeMap<usize, BucketReport>, EvalError> {
    check_ids(gold, pred)?;
    let mut tallies: BTreeMap<usize, Tally> = BTreeMap::new();
    for u in corpus {
        let (Some(g), Some(p)) = (gold.get(&u.id), pred.get(&u.id)) else {
            return Err(EvalError::IdMismatch(u.id.clone()));
        };
        tally_assignment(tallies.entry(u.slots.len()).or_default(), &u.id, g, p)?;
    }
    Ok(tallies.into_iter().map(|(n, t)| (n, t.bucket())).collect())
}

type Triple = ((usize, usize, String), (usize, usize, String), String);

fn span_key(s: &SlotSpan) -> (usize, usize, String) {
    (s.start, s.end, s.label.clone())
}

fn triples(u: &AnnotatedUtterance) -> BTreeSet<Triple> {
    u.relations
        .iter()
        .map(|(p, l)| {
            let (a, b) = (span_key(&u.slots[p.first()]), span_key(&u.slots[p.second()]));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (a, b, l.clone())
        })
        .collect()
}

/// Scoring when predicted slots may differ from gold: a relation counts as
/// correct when both endpoint spans (offsets and labels) and the relation
/// label match. An utterance is an exact match when its slots and relations
/// both equal gold. With gold slots this equals [`relation_scores`].
pub fn span_relation_scores(gold: &[AnnotatedUtterance], pred: &[AnnotatedUtterance]) -> Result<Tally, EvalError> {
    let by_id: BTreeMap<&str, &AnnotatedUtterance> = pred.iter().map(|u| (u.id.as_str(), u)).collect();
    if by_id.len() != gold.len() {
        return Err(EvalError::IdMismatch(String::from("<count>")));
    }
    let mut t = Tally::default();
    for g in gold {
        let p = by_id.get(g.id.as_str()).ok_or_else(|| EvalError::IdMismatch(g.id.clone()))?;
        let (gt, pt) = (triples(g), triples(p));
        for x in gt.union(&pt) {
            let gl = gt.contains(x).then_some(x.2.as_str());
            let pl = pt.contains(x).then_some(x.2.as_str());
            t.pair(gl, pl);
        }
        t.utterance(g.slots == p.slots && gt == pt);
    }
    Ok(t)
}

/// Scores restricted to pairs whose slot types are `{a, b}` in either order.
pub fn pair_type_scores(
    corpus: &[AnnotatedUtterance],
    pred: &CorpusAssignments,
    a: &str,
    b: &str,
) -> Result<Confusion, EvalError> {
    let mut t = Tally::default();
    for u in corpus {
        let p = pred.get(&u.id).ok_or_else(|| EvalError::IdMismatch(u.id.clone()))?;
        for pair in u.slot_pairs() {
            let (x, y) = (&u.slots[pair.first()].label, &u.slots[pair.second()].label);
            if (x == a && y == b) || (x == b && y == a) {
                t.pair(u.relation(pair), p.get(pair));
            }
        }
    }
    Ok(t.micro())
}

/// Mean and range of one score across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let mut s = Spread { mean: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY };
        for &x in xs {
            s.mean += x;
            s.min = s.min.min(x);
            s.max = s.max.max(x);
        }
        s.mean /= xs.len() as f64;
        Some(s)
    }

    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub runs: usize,
    pub p: Spread,
    pub r: Spread,
    pub f1: Spread,
    pub em: Spread,
    pub reports: Vec<MetricsReport>,
}

/// Mean and range over several runs' reports; `None` for no runs.
pub fn aggregate(reports: Vec<MetricsReport>) -> Option<AggregateReport> {
    let col = |f: fn(&Scores) -> f64| -> Vec<f64> { reports.iter().map(|r| f(&r.overall)).collect() };
    Some(AggregateReport {
        runs: reports.len(),
        p: Spread::of(&col(|s| s.p))?,
        r: Spread::of(&col(|s| s.r))?,
        f1: Spread::of(&col(|s| s.f1))?,
        em: Spread::of(&col(|s| s.em))?,
        reports,
    })
}
