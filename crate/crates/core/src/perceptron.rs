//! Averaged multiclass perceptron shared by the slot tagger and the pair
//! classifier.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// Dense per-label weight rows keyed by feature name.
pub type WeightMap = BTreeMap<String, Vec<f64>>;

struct Row {
    weights: Vec<f64>,
    totals: Vec<f64>,
    stamps: Vec<u64>,
}

/// Online trainer with lazily accumulated weight averages.
pub(crate) struct Trainer {
    n_labels: usize,
    index: BTreeMap<String, usize>,
    names: Vec<String>,
    rows: Vec<Row>,
    clock: u64,
}

impl Trainer {
    pub fn new(n_labels: usize) -> Self {
        Self {
            n_labels,
            index: BTreeMap::new(),
            names: Vec::new(),
            rows: Vec::new(),
            clock: 0,
        }
    }

    pub fn intern(&mut self, feature: &str) -> usize {
        if let Some(&id) = self.index.get(feature) {
            return id;
        }
        let id = self.rows.len();
        self.index.insert(feature.to_string(), id);
        self.names.push(feature.to_string());
        self.rows.push(Row {
            weights: vec![0.0; self.n_labels],
            totals: vec![0.0; self.n_labels],
            stamps: vec![0; self.n_labels],
        });
        id
    }

    pub fn intern_all(&mut self, features: &[String]) -> Vec<usize> {
        features.iter().map(|f| self.intern(f)).collect()
    }

    pub fn scores(&self, ids: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_labels];
        for &id in ids {
            for (s, w) in out.iter_mut().zip(&self.rows[id].weights) {
                *s += w;
            }
        }
        out
    }

    fn bump(&mut self, id: usize, label: usize, delta: f64) {
        let clock = self.clock;
        let row = &mut self.rows[id];
        row.totals[label] += (clock - row.stamps[label]) as f64 * row.weights[label];
        row.stamps[label] = clock;
        row.weights[label] += delta;
    }

    /// Standard perceptron step; a no-op when the guess is right.
    pub fn update(&mut self, truth: usize, guess: usize, ids: &[usize]) {
        if truth == guess {
            return;
        }
        for &id in ids {
            self.bump(id, truth, 1.0);
            self.bump(id, guess, -1.0);
        }
    }

    /// Advances the averaging clock by one training instance.
    pub fn tick(&mut self) {
        self.clock += 1;
    }

    /// Averaged weights; rows that average to zero are dropped.
    pub fn finish(self) -> WeightMap {
        let clock = self.clock;
        let mut out = WeightMap::new();
        if clock == 0 {
            return out;
        }
        for (name, row) in self.names.into_iter().zip(self.rows) {
            let avg: Vec<f64> = (0..row.weights.len())
                .map(|l| {
                    let total = row.totals[l] + (clock - row.stamps[l]) as f64 * row.weights[l];
                    total / clock as f64
                })
                .collect();
            if avg.iter().any(|w| *w != 0.0) {
                out.insert(name, avg);
            }
        }
        out
    }
}

/// Sums weight rows for the given features.
pub fn score(weights: &WeightMap, n_labels: usize, features: &[String]) -> Vec<f64> {
    let mut out = vec![0.0; n_labels];
    for f in features {
        if let Some(row) = weights.get(f) {
            for (s, w) in out.iter_mut().zip(row) {
                *s += w;
            }
        }
    }
    out
}

/// Index of the highest allowed score; ties go to the lowest index.
pub fn argmax(scores: &[f64], allowed: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if !allowed(i) {
            continue;
        }
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averaging_matches_hand_computation() {
        let mut t = Trainer::new(2);
        let f = t.intern("f");
        // instance 1: wrong, update at clock 0
        t.update(0, 1, &[f]);
        t.tick();
        // instance 2: no update
        t.tick();
        let w = t.finish();
        // weight for label 0 is 1 over both ticks, label 1 is -1
        assert_eq!(w["f"], vec![1.0, -1.0]);
    }

    #[test]
    fn averaging_of_late_update() {
        let mut t = Trainer::new(2);
        let f = t.intern("f");
        t.tick();
        t.update(0, 1, &[f]);
        t.tick();
        let w = t.finish();
        assert_eq!(w["f"], vec![0.5, -0.5]);
    }

    #[test]
    fn argmax_breaks_ties_by_index() {
        assert_eq!(argmax(&[0.0, 0.0, 0.0], |_| true), Some(0));
        assert_eq!(argmax(&[0.0, 1.0, 1.0], |_| true), Some(1));
        assert_eq!(argmax(&[5.0, 1.0, 1.0], |i| i != 0), Some(1));
        assert_eq!(argmax(&[5.0], |_| false), None);
    }
}
