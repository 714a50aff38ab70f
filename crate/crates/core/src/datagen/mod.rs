//! Seeded synthetic corpora for the food, gaming and stocks domains.
//!
//! Generation first builds a deduplicated pool of candidate utterances per
//! slot count, then fills each split position by drawing a slot count, a
//! slot pattern, and finally an utterance of that pattern. An exact per-split
//! quota of utterances is drawn from candidates the nearest-candidate
//! heuristic gets wrong; longer utterances are favored for that quota.

mod builder;
mod food;
mod gaming;
mod stocks;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotation::{utterance, AnnotatedUtterance, SlotPattern};
use crate::relex::{heuristic_extract, RelationAssignment};
use crate::schema::{builtin, DomainSchema};
use builder::Draft;

pub const SPLIT_NAMES: [&str; 3] = ["train", "dev", "test"];
/// Default zero-shot schedule of added training examples.
pub const K_SCHEDULE: [usize; 5] = [0, 8, 16, 32, 64];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatagenError {
    #[error("no generator for domain `{0}`")]
    UnknownDomain(String),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("pool exhausted for {slots}-slot utterances (ambiguous: {ambiguous})")]
    Capacity { slots: usize, ambiguous: bool },
    #[error("held-out construct occurs in {available} utterances, {needed} needed")]
    InsufficientConstruct { needed: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub domain: String,
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    pub seed: u64,
    /// Relative weight of each slot count in `1..=6`.
    pub slot_counts: BTreeMap<usize, f64>,
    /// Fraction of utterances whose gold relations differ from the
    /// nearest-candidate heuristic's output.
    pub ambiguity_rate: f64,
}

type Defaults = ((usize, usize, usize), &'static [(usize, f64)], f64);

impl GeneratorConfig {
    /// Default sizes and distributions for a built-in domain.
    pub fn for_domain(domain: &str) -> Option<Self> {
        let (sizes, counts, rate): Defaults = match domain {
            "food" => ((1059, 227, 227), &[(2, 0.2), (3, 0.2), (4, 0.2), (5, 0.2), (6, 0.2)], 0.15),
            "gaming" => ((529, 114, 114), &[(2, 0.30), (3, 0.33), (4, 0.28), (5, 0.06), (6, 0.03)], 0.15),
            "stocks" => (
                (882, 189, 189),
                &[(1, 0.10), (2, 0.20), (3, 0.25), (4, 0.25), (5, 0.10), (6, 0.10)],
                0.0,
            ),
            _ => return None,
        };
        Some(Self {
            domain: domain.to_string(),
            train: sizes.0,
            dev: sizes.1,
            test: sizes.2,
            seed: 0,
            slot_counts: counts.iter().copied().collect(),
            ambiguity_rate: rate,
        })
    }

    /// Splits `total` 70/15/15, rounding dev and test down.
    pub fn with_total(mut self, total: usize) -> Self {
        self.dev = total * 15 / 100;
        self.test = total * 15 / 100;
        self.train = total - self.dev - self.test;
        self
    }

    pub fn total(&self) -> usize {
        self.train + self.dev + self.test
    }

    fn check(&self) -> Result<(), DatagenError> {
        if !(0.0..=1.0).contains(&self.ambiguity_rate) {
            return Err(DatagenError::InvalidConfig(format!("ambiguity_rate {} outside [0, 1]", self.ambiguity_rate)));
        }
        if self.slot_counts.keys().any(|&n| !(1..=6).contains(&n)) {
            return Err(DatagenError::InvalidConfig("slot counts must lie in 1..=6".into()));
        }
        if self.slot_counts.values().any(|&w| w.is_nan() || w < 0.0) || self.slot_counts.values().all(|&w| w == 0.0) {
            return Err(DatagenError::InvalidConfig("slot-count weights must be non-negative and not all zero".into()));
        }
        Ok(())
    }
}

/// Train/dev/test utterances of one domain. Stocks corpora also carry the
/// contextual-label annotation of the same texts under the same ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub domain: String,
    pub train: Vec<AnnotatedUtterance>,
    pub dev: Vec<AnnotatedUtterance>,
    pub test: Vec<AnnotatedUtterance>,
    pub slot_based: Option<[Vec<AnnotatedUtterance>; 3]>,
}

impl Corpus {
    pub fn splits(&self) -> [(&'static str, &[AnnotatedUtterance]); 3] {
        [("train", &self.train), ("dev", &self.dev), ("test", &self.test)]
    }

    /// All utterances, train then dev then test.
    pub fn all(&self) -> Vec<AnnotatedUtterance> {
        self.train.iter().chain(&self.dev).chain(&self.test).cloned().collect()
    }

    /// Slot-based counterparts of every utterance, keyed by id.
    pub fn slot_based_by_id(&self) -> BTreeMap<String, AnnotatedUtterance> {
        self.slot_based
            .iter()
            .flatten()
            .flatten()
            .map(|u| (u.id.clone(), u.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitStats {
    pub utterances: usize,
    pub ambiguous: usize,
    pub ambiguity_fraction: f64,
    pub relations: usize,
    pub patterns: usize,
    pub slot_counts: BTreeMap<usize, usize>,
}

/// What was generated and how; the std layer adds file names and a hash of
/// `inventory`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: GeneratorConfig,
    pub pool_size: usize,
    pub stats: BTreeMap<String, SplitStats>,
    pub inventory: String,
}

/// Description of every template and gazetteer of a domain's grammar.
pub fn inventory(domain: &str) -> Option<String> {
    match domain {
        "food" => Some(food::inventory()),
        "gaming" => Some(gaming::inventory()),
        "stocks" => Some(stocks::inventory()),
        _ => None,
    }
}

/// True iff the nearest-candidate heuristic disagrees with the utterance's
/// gold relations.
pub fn is_ambiguous(u: &AnnotatedUtterance, schema: &DomainSchema) -> bool {
    heuristic_extract(&u.slots, schema).map_or(true, |a| a != RelationAssignment::from_gold(u))
}

struct Candidate {
    rb: AnnotatedUtterance,
    sb: Option<AnnotatedUtterance>,
}

type Cell = BTreeMap<SlotPattern, Vec<Candidate>>;

fn realize(d: Draft, domain: &str) -> Candidate {
    let slots: Vec<(&str, usize, usize)> = d.slots.iter().map(|(l, s, e)| (l.as_str(), *s, *e)).collect();
    let mut rb = utterance("", domain, &d.text, &slots, &d.relations).expect("generated spans are well formed");
    rb.intent = Some(d.intent.to_string());
    let sb = d.sb_slots.map(|sb| {
        let slots: Vec<(&str, usize, usize)> = sb.iter().map(|(l, s, e)| (l.as_str(), *s, *e)).collect();
        let mut u = utterance("", "stocks_slot_based", &d.text, &slots, &[]).expect("generated spans are well formed");
        u.intent = rb.intent.clone();
        u
    });
    Candidate { rb, sb }
}

fn draft(domain: &str, rng: &mut ChaCha8Rng, n: usize) -> Option<Draft> {
    match domain {
        "food" => food::draft(rng, n),
        "gaming" => gaming::draft(rng, n),
        _ => stocks::draft(rng, n),
    }
}

fn build_pool(
    config: &GeneratorConfig,
    schema: &DomainSchema,
    rng: &mut ChaCha8Rng,
) -> (BTreeMap<(usize, bool), Cell>, usize) {
    let total_weight: f64 = config.slot_counts.values().sum();
    let mut seen = BTreeSet::new();
    let mut cells: BTreeMap<(usize, bool), Cell> = BTreeMap::new();
    let mut size = 0;
    for (&n, &w) in &config.slot_counts {
        if w == 0.0 {
            continue;
        }
        let expected = (w / total_weight * config.total() as f64) as usize + 1;
        for _ in 0..20 * expected + 200 {
            let Some(d) = draft(&config.domain, rng, n) else { continue };
            if !seen.insert(d.text.clone()) {
                continue;
            }
            let c = realize(d, &config.domain);
            let ambiguous = is_ambiguous(&c.rb, schema);
            cells.entry((n, ambiguous)).or_default().entry(c.rb.slot_pattern()).or_default().push(c);
            size += 1;
        }
    }
    (cells, size)
}

fn weighted_index(rng: &mut ChaCha8Rng, weights: &[f64]) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return Some(i);
        }
        x -= w;
    }
    weights.iter().rposition(|&w| w > 0.0)
}

/// Slot counts for `size` positions and which of them are ambiguous.
fn plan_split(
    config: &GeneratorConfig,
    cells: &BTreeMap<(usize, bool), Cell>,
    size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, bool)> {
    let support: Vec<usize> = config.slot_counts.keys().copied().collect();
    let weights: Vec<f64> = config.slot_counts.values().copied().collect();
    let mut positions: Vec<(usize, bool)> = (0..size)
        .map(|_| (support[weighted_index(rng, &weights).expect("checked weights")], false))
        .collect();
    let quota = (config.ambiguity_rate * size as f64 + 0.5) as usize;
    for _ in 0..quota {
        let w: Vec<f64> = positions
            .iter()
            .map(|&(n, amb)| {
                let available = cells.get(&(n, true)).is_some_and(|c| !c.is_empty());
                if amb || !available {
                    0.0
                } else {
                    ((n - 1) * (n - 1)).max(1) as f64
                }
            })
            .collect();
        match weighted_index(rng, &w) {
            Some(i) => positions[i].1 = true,
            None => break,
        }
    }
    positions
}

fn take(cells: &mut BTreeMap<(usize, bool), Cell>, key: (usize, bool), rng: &mut ChaCha8Rng) -> Option<Candidate> {
    let cell = cells.get_mut(&key)?;
    let patterns: Vec<SlotPattern> = cell.keys().cloned().collect();
    let pattern = patterns.choose(rng)?.clone();
    let group = cell.get_mut(&pattern).expect("listed pattern");
    let i = rng.gen_range(0..group.len());
    let c = group.swap_remove(i);
    if group.is_empty() {
        cell.remove(&pattern);
    }
    Some(c)
}

/// Generates a corpus and its manifest.
pub fn generate(config: &GeneratorConfig, schema: &DomainSchema) -> Result<(Corpus, Manifest), DatagenError> {
    config.check()?;
    let inventory = inventory(&config.domain).ok_or_else(|| DatagenError::UnknownDomain(config.domain.clone()))?;
    if schema.domain() != config.domain {
        return Err(DatagenError::InvalidConfig(format!(
            "schema is for `{}`, config for `{}`",
            schema.domain(),
            config.domain
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut cells, pool_size) = build_pool(config, schema, &mut rng);

    let sizes = [config.train, config.dev, config.test];
    let mut rb_splits: [Vec<AnnotatedUtterance>; 3] = Default::default();
    let mut sb_splits: [Vec<AnnotatedUtterance>; 3] = Default::default();
    let mut stats = BTreeMap::new();
    for (k, &size) in sizes.iter().enumerate() {
        let name = SPLIT_NAMES[k];
        let positions = plan_split(config, &cells, size, &mut rng);
        let mut split_stats = SplitStats {
            utterances: size,
            ambiguous: 0,
            ambiguity_fraction: 0.0,
            relations: 0,
            patterns: 0,
            slot_counts: BTreeMap::new(),
        };
        let mut patterns = BTreeSet::new();
        for (index, (n, ambiguous)) in positions.into_iter().enumerate() {
            let c = take(&mut cells, (n, ambiguous), &mut rng)
                .ok_or(DatagenError::Capacity { slots: n, ambiguous })?;
            let id = format!("{}-{}-{:05}", config.domain, name, index);
            let mut rb = c.rb;
            rb.id = id.clone();
            split_stats.ambiguous += ambiguous as usize;
            split_stats.relations += rb.relations.len();
            *split_stats.slot_counts.entry(n).or_default() += 1;
            patterns.insert(rb.slot_pattern());
            rb_splits[k].push(rb);
            if let Some(mut sb) = c.sb {
                sb.id = id;
                sb_splits[k].push(sb);
            }
        }
        split_stats.patterns = patterns.len();
        split_stats.ambiguity_fraction =
            if size == 0 { 0.0 } else { split_stats.ambiguous as f64 / size as f64 };
        stats.insert(name.to_string(), split_stats);
    }
    let dual = sb_splits.iter().any(|s| !s.is_empty());
    let [train, dev, test] = rb_splits;
    let corpus = Corpus {
        domain: config.domain.clone(),
        train,
        dev,
        test,
        slot_based: dual.then_some(sb_splits),
    };
    let manifest = Manifest { config: config.clone(), pool_size, stats, inventory };
    Ok((corpus, manifest))
}

/// Generates a built-in domain with its default config and the given seed.
pub fn generate_default(domain: &str, seed: u64) -> Result<(Corpus, Manifest), DatagenError> {
    let mut config = GeneratorConfig::for_domain(domain).ok_or_else(|| DatagenError::UnknownDomain(domain.into()))?;
    config.seed = seed;
    let schema = builtin::by_name(domain).ok_or_else(|| DatagenError::UnknownDomain(domain.into()))?;
    generate(&config, &schema)
}

/// The construct held out of training in a zero-shot split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeldOut {
    /// Any slot with this label.
    Slot { label: String },
    /// A relation between slots of these two types, in either order.
    Pair { a: String, b: String },
}

impl HeldOut {
    pub fn slot(label: &str) -> Self {
        HeldOut::Slot { label: label.into() }
    }

    pub fn pair(a: &str, b: &str) -> Self {
        HeldOut::Pair { a: a.into(), b: b.into() }
    }

    /// Default test size: 90 for slots, 50 for pairs.
    pub fn default_test_size(&self) -> usize {
        match self {
            HeldOut::Slot { .. } => 90,
            HeldOut::Pair { .. } => 50,
        }
    }

    pub fn exhibited_by(&self, u: &AnnotatedUtterance) -> bool {
        match self {
            HeldOut::Slot { label } => u.slots.iter().any(|s| &s.label == label),
            HeldOut::Pair { a, b } => u.relations.keys().any(|p| {
                let (x, y) = (&u.slots[p.first()].label, &u.slots[p.second()].label);
                (x == a && y == b) || (x == b && y == a)
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroShotSplit {
    pub train: Vec<AnnotatedUtterance>,
    pub test: Vec<AnnotatedUtterance>,
}

/// Train holds every utterance without the construct plus exactly `k` with
/// it; test holds `test_size` other utterances with it. The test set depends
/// only on `seed`, not on `k`.
pub fn make_zero_shot_split(
    corpus: &[AnnotatedUtterance],
    held_out: &HeldOut,
    k: usize,
    test_size: usize,
    seed: u64,
) -> Result<ZeroShotSplit, DatagenError> {
    let mut with: Vec<&AnnotatedUtterance> = corpus.iter().filter(|u| held_out.exhibited_by(u)).collect();
    if with.len() < k + test_size {
        return Err(DatagenError::InsufficientConstruct { needed: k + test_size, available: with.len() });
    }
    with.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = with[..test_size].iter().map(|u| (*u).clone()).collect();
    let added: BTreeSet<&str> = with[test_size..test_size + k].iter().map(|u| u.id.as_str()).collect();
    let train = corpus
        .iter()
        .filter(|u| !held_out.exhibited_by(u) || added.contains(u.id.as_str()))
        .cloned()
        .collect();
    Ok(ZeroShotSplit { train, test })
}

#[cfg(test)]
mod tests;
