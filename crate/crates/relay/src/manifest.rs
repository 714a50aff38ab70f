//! Manifests written next to generated corpora and splits.

use std::collections::BTreeMap;

use relay_core::datagen::{GeneratorConfig, Manifest, SplitStats};
use relay_core::eval::SplitSpec;
use relay_core::AnnotatedUtterance;
use serde::{Deserialize, Serialize};

use crate::corpus::corpus_to_jsonl;
use crate::sha256_hex;

/// Size and digest of one written corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub utterances: usize,
    pub sha256: String,
}

impl FileEntry {
    pub fn of(corpus: &[AnnotatedUtterance]) -> Self {
        Self { utterances: corpus.len(), sha256: sha256_hex(corpus_to_jsonl(corpus).as_bytes()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateManifest {
    pub config: GeneratorConfig,
    pub seed: u64,
    pub pool_size: usize,
    /// SHA-256 of the domain's template and lexicon inventory.
    pub inventory_sha256: String,
    pub stats: BTreeMap<String, SplitStats>,
    /// Relative file name to its entry.
    pub files: BTreeMap<String, FileEntry>,
}

impl GenerateManifest {
    pub fn new(manifest: &Manifest, files: BTreeMap<String, FileEntry>) -> Self {
        Self {
            config: manifest.config.clone(),
            seed: manifest.config.seed,
            pool_size: manifest.pool_size,
            inventory_sha256: sha256_hex(manifest.inventory.as_bytes()),
            stats: manifest.stats.clone(),
            files,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub spec: SplitSpec,
    pub source: FileEntry,
    pub train: FileEntry,
    pub test: FileEntry,
    pub train_patterns: usize,
    pub test_patterns: usize,
    /// Slot patterns present on both sides.
    pub shared_patterns: usize,
}

impl SplitManifest {
    pub fn new(spec: &SplitSpec, source: &[AnnotatedUtterance], train: &[AnnotatedUtterance], test: &[AnnotatedUtterance]) -> Self {
        let patterns = |us: &[AnnotatedUtterance]| us.iter().map(|u| u.slot_pattern()).collect::<std::collections::BTreeSet<_>>();
        let (a, b) = (patterns(train), patterns(test));
        Self {
            spec: spec.clone(),
            source: FileEntry::of(source),
            train: FileEntry::of(train),
            test: FileEntry::of(test),
            train_patterns: a.len(),
            test_patterns: b.len(),
            shared_patterns: a.intersection(&b).count(),
        }
    }
}
