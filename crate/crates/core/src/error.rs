use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline, from corpus ingestion through
/// evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: invalid UTF-8")]
    Decode { path: PathBuf, line: usize },

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error("{path}: expected columns {expected:?}, found {found:?}")]
    Schema {
        path: PathBuf,
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular design matrix; collinear columns: {columns:?}")]
    SingularDesign { columns: Vec<String> },

    #[error("fold {fold} has {rows} rows but the model needs more than {needed}")]
    FoldTooSmall {
        fold: usize,
        rows: usize,
        needed: usize,
    },

    #[error("ARPA parse error at line {line}: {message}")]
    ArpaParse { line: usize, message: String },

    #[error("full model has r2 = 1; Cohen's f2 is infinite")]
    InfiniteEffect,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
