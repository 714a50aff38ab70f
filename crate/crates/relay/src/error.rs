use std::path::{Path, PathBuf};

use relay_core::annotation::AnnotationError;
use relay_core::datagen::DatagenError;
use relay_core::eval::EvalError;
use relay_core::logic::LogicError;
use relay_core::relex::RelexError;
use relay_core::schema::SchemaError;
use relay_core::slotfill::SlotFillError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}:{line}: {source}")]
    Json { origin: String, line: usize, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    SlotFill(#[from] SlotFillError),
    #[error(transparent)]
    Relex(#[from] RelexError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn json(origin: &str, line: usize, source: serde_json::Error) -> Self {
        Error::Json { origin: origin.to_string(), line, source }
    }
}
