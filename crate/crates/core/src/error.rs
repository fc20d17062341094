use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("multi-index of length zero has no class")]
    NoClass,
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("no delta-regular coordinates found: {0}")]
    DeltaRegularity(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
