use thiserror::Error;

/// Errors shared by every fidelimax crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A quantity that must be strictly positive vanished (for example an
    /// unsmoothed probability inside a logarithm).
    #[error("singularity: {0}")]
    Singularity(String),

    /// The request is too large to honour.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),

    /// Data and estimator (or plan) do not belong together.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// An iterative procedure failed to meet its stopping rule.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
