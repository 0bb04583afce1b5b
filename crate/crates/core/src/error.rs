use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the inference pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("MLE undefined for cause {cause}: no failures observed")]
    UndefinedMle { cause: usize },

    #[error("improper posterior for cause {cause}: n_q = {count} must exceed zeta - 1 = {limit}")]
    ImproperPosterior { cause: usize, count: u64, limit: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
