//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments, shapes or configuration supplied by the caller.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Configuration that fails validation before any work starts.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: expected {expected}, got {got} ({context})")]
    ShapeMismatch {
        expected: String,
        got: String,
        context: String,
    },

    /// Degenerate numeric input (constant sequence, no voiced frames, zero variance).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Corrupt or malformed data encountered while reading artifacts.
    #[error("data error: {0}")]
    Data(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn shape(expected: impl Into<String>, got: impl Into<String>, context: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            expected: expected.into(),
            got: got.into(),
            context: context.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
