//! Files around `relay-core`: JSON Lines corpora, model weight files,
//! operation files and run manifests.
//!
//! Every writer here is byte-stable: the same value always serializes to the
//! same bytes, so reruns with the same seed can be compared with `cmp`.

pub mod corpus;
pub mod manifest;
pub mod model;
pub mod ops;

mod error;

pub use error::{Error, Result};

use std::path::Path;

/// Writes `contents`, creating parent directories as needed.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    format!("{:x}", Sha256::digest(bytes))
}
