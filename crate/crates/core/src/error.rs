use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The impaired-DFT system is singular or too poorly conditioned to
    /// invert reliably.
    #[error("ill-conditioned system: condition number {condition:.3e} exceeds {threshold:.1e}")]
    IllConditioned { condition: f64, threshold: f64 },

    #[error("insufficient length: {0}")]
    InsufficientLength(String),

    /// A normalization had nothing to normalize (all-zero signal).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
