//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by channel synthesis, beamformer optimization, and the
/// simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a precondition (bad index,
    /// inconsistent dimensions, invalid configuration value).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix that must be invertible (or positive definite) was singular.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// An iterative routine failed to reach its tolerance within its cap.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Filesystem error, annotated with the path that caused it.
    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// JSON (de)serialization error.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn singular(msg: impl Into<String>) -> Self {
        Error::SingularMatrix(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericFailure(msg.into())
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
