use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::annotation::tokenize;

/// One generated utterance before ids are assigned. `sb_slots` carries the
/// contextual-label view of the same text for the stocks domain.
#[derive(Debug, Clone)]
pub(crate) struct Draft {
    pub text: String,
    pub intent: &'static str,
    pub slots: Vec<(String, usize, usize)>,
    pub sb_slots: Option<Vec<(String, usize, usize)>>,
    pub relations: Vec<(usize, usize, &'static str)>,
}

#[derive(Default)]
pub(crate) struct Builder {
    text: String,
    len: usize,
    slots: Vec<(String, usize, usize)>,
    sb_slots: Vec<(String, usize, usize)>,
    relations: Vec<(usize, usize, &'static str)>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends plain words. Leading punctuation attaches to the previous word.
    pub fn words(&mut self, s: &str) -> &mut Self {
        for w in s.split_whitespace() {
            let glue = w.starts_with([',', '.', '?', '!']);
            if !self.text.is_empty() && !glue {
                self.text.push(' ');
            }
            self.text.push_str(w);
            self.len += tokenize(w).len();
        }
        self
    }

    fn span(&mut self, value: &str) -> (usize, usize) {
        let start = self.len;
        self.words(value);
        (start, self.len)
    }

    /// A slot present in both labeling schemes (or only in the relation-based
    /// one when `sb` is `None`).
    pub fn slot2(&mut self, label: &str, sb: Option<&str>, value: &str) -> usize {
        let (s, e) = self.span(value);
        self.slots.push((label.to_string(), s, e));
        if let Some(sb) = sb {
            self.sb_slots.push((sb.to_string(), s, e));
        }
        self.slots.len() - 1
    }

    pub fn slot(&mut self, label: &str, value: &str) -> usize {
        self.slot2(label, None, value)
    }

    pub fn rel(&mut self, a: usize, b: usize, label: &'static str) {
        self.relations.push((a, b, label));
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn finish(mut self, intent: &'static str, end: &str, dual: bool) -> Draft {
        self.words(end);
        let mut text = String::with_capacity(self.text.len());
        let mut chars = self.text.chars();
        if let Some(c) = chars.next() {
            text.extend(c.to_uppercase());
            text.push_str(chars.as_str());
        }
        Draft {
            text,
            intent,
            slots: self.slots,
            sb_slots: dual.then_some(self.sb_slots),
            relations: self.relations,
        }
    }
}

pub(crate) fn pick<'a, T>(rng: &mut ChaCha8Rng, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("non-empty vocabulary")
}

pub(crate) fn chance(rng: &mut ChaCha8Rng, p: f64) -> bool {
    rng.gen_bool(p)
}

/// `a` or `an` for the following word.
pub(crate) fn article(next: &str) -> &'static str {
    if next.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

/// Sentence-final punctuation, sometimes none.
pub(crate) fn ending(rng: &mut ChaCha8Rng, question: bool) -> &'static str {
    match rng.gen_range(0..3) {
        0 => "",
        _ if question => "?",
        _ => ".",
    }
}

/// Joins item phrases as `a`, `a and b` or `a, b and c`; returns the
/// connective to place before each item after the first.
pub(crate) fn connective(index: usize, total: usize) -> &'static str {
    if index + 1 == total {
        "and"
    } else {
        ","
    }
}

pub(crate) fn describe(name: &str, xs: &[&str]) -> String {
    let mut s = String::from(name);
    s.push('=');
    s.push_str(&xs.join("|"));
    s.push('\n');
    s
}
