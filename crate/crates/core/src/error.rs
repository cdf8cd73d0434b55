use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input value violates a documented precondition. `field` names the
    /// offending input so callers can surface it directly.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// The advisory-speed formula is undefined for the given inputs.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncation window holds too little normal mass to sample from.
    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("crash-rate table {path}: {reason}")]
    Config { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
