use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::annotation::{AnnotatedUtterance, SlotPattern};
use crate::datagen::{make_zero_shot_split, HeldOut};

pub const DEFAULT_TEST_FRACTION: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// Utterance-level shuffle.
    Random { test_fraction: f64 },
    /// Whole slot-pattern groups on one side only.
    Pattern { test_fraction: f64 },
    ZeroShotSlot { label: String, k: usize, test_size: usize },
    ZeroShotPair { a: String, b: String, k: usize, test_size: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub strategy: Strategy,
    pub seed: u64,
}

impl SplitSpec {
    pub fn random(seed: u64) -> Self {
        Self { strategy: Strategy::Random { test_fraction: DEFAULT_TEST_FRACTION }, seed }
    }

    pub fn pattern(seed: u64) -> Self {
        Self { strategy: Strategy::Pattern { test_fraction: DEFAULT_TEST_FRACTION }, seed }
    }

    pub fn zero_shot_slot(label: &str, k: usize, seed: u64) -> Self {
        Self { strategy: Strategy::ZeroShotSlot { label: label.into(), k, test_size: 90 }, seed }
    }

    pub fn zero_shot_pair(a: &str, b: &str, k: usize, seed: u64) -> Self {
        Self { strategy: Strategy::ZeroShotPair { a: a.into(), b: b.into(), k, test_size: 50 }, seed }
    }

    /// Applies the split to a pool of utterances.
    pub fn apply(&self, pool: &[AnnotatedUtterance]) -> Result<(Vec<AnnotatedUtterance>, Vec<AnnotatedUtterance>), EvalError> {
        match &self.strategy {
            Strategy::Random { test_fraction } => random_split(pool, *test_fraction, self.seed),
            Strategy::Pattern { test_fraction } => pattern_split_with(pool, *test_fraction, self.seed),
            Strategy::ZeroShotSlot { label, k, test_size } => {
                let z = make_zero_shot_split(pool, &HeldOut::slot(label), *k, *test_size, self.seed)?;
                Ok((z.train, z.test))
            }
            Strategy::ZeroShotPair { a, b, k, test_size } => {
                let z = make_zero_shot_split(pool, &HeldOut::pair(a, b), *k, *test_size, self.seed)?;
                Ok((z.train, z.test))
            }
        }
    }
}

fn test_target(len: usize, fraction: f64) -> Result<usize, EvalError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(EvalError::InvalidSplit("test fraction must lie in (0, 1)"));
    }
    Ok((fraction * len as f64 + 0.5) as usize)
}

/// Shuffles utterances and cuts off a test share.
pub fn random_split(
    pool: &[AnnotatedUtterance],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<AnnotatedUtterance>, Vec<AnnotatedUtterance>), EvalError> {
    if pool.len() < 2 {
        return Err(EvalError::InvalidSplit("random split needs at least two utterances"));
    }
    let target = test_target(pool.len(), test_fraction)?.clamp(1, pool.len() - 1);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = order[..target].iter().map(|&i| pool[i].clone()).collect();
    let mut train_idx = order[target..].to_vec();
    train_idx.sort_unstable();
    Ok((train_idx.into_iter().map(|i| pool[i].clone()).collect(), test))
}

/// Slot-pattern split with the default 30% test mass.
pub fn pattern_split(
    pool: &[AnnotatedUtterance],
    seed: u64,
) -> Result<(Vec<AnnotatedUtterance>, Vec<AnnotatedUtterance>), EvalError> {
    pattern_split_with(pool, DEFAULT_TEST_FRACTION, seed)
}

/// Groups utterances by slot pattern and visits the groups in seeded random
/// order, moving each to test while it still fits under the target mass.
/// Every pattern ends up on exactly one side; each side gets at least one
/// group.
pub fn pattern_split_with(
    pool: &[AnnotatedUtterance],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<AnnotatedUtterance>, Vec<AnnotatedUtterance>), EvalError> {
    let mut groups: BTreeMap<SlotPattern, Vec<usize>> = BTreeMap::new();
    for (i, u) in pool.iter().enumerate() {
        groups.entry(u.slot_pattern()).or_default().push(i);
    }
    if groups.len() < 2 {
        return Err(EvalError::TooFewPatterns(groups.len()));
    }
    let target = test_target(pool.len(), test_fraction)?;
    let mut order: Vec<&Vec<usize>> = groups.values().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut is_test = alloc::vec![false; pool.len()];
    let mut test_count = 0;
    let mut test_groups = 0;
    for (g, members) in order.iter().enumerate() {
        let last_chance = test_groups == 0 && g + 1 == order.len() - 1;
        if test_count + members.len() <= target || last_chance {
            for &i in members.iter() {
                is_test[i] = true;
            }
            test_count += members.len();
            test_groups += 1;
            if test_groups + 1 == order.len() {
                break;
            }
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (u, t) in pool.iter().zip(is_test) {
        if t {
            test.push(u.clone());
        } else {
            train.push(u.clone());
        }
    }
    Ok((train, test))
}
