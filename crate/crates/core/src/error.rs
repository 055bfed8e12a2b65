//! Crate error types.

use thiserror::Error;

/// Errors raised while loading, validating or splitting datasets.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing mandatory file: {0}")]
    MissingFile(String),
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path} line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid data: {0}")]
    Invalid(String),
}

/// Errors raised by model training and inference.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
    #[error(transparent)]
    Data(#[from] DataError),
}
