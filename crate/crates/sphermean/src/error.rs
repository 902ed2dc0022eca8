//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A polynomial operation received or produced data outside its domain,
    /// e.g. a square-linear-factor query on the zero polynomial.
    #[error("polynomial domain error: {0}")]
    PolyDomain(String),

    /// Two lines were parallel (or anti-parallel) within tolerance, so the
    /// closest-point system is singular.
    #[error("lines are parallel within tolerance (1 - <e,e>^2 = {discriminant:e})")]
    ParallelLines { discriminant: f64 },

    /// A ruled chart was regular at the queried parameters; the singular
    /// shift is undefined there.
    #[error("chart is regular at (t0, lambda0): {0}")]
    NotSingular(String),

    /// The truncation order of a series is too low to support the requested
    /// operation or decision.
    #[error("truncation order too low: {0}")]
    TruncationTooLow(String),

    /// A function value was requested from an object that is a measure, not
    /// a pointwise-evaluable function.
    #[error("object is not pointwise evaluable: {0}")]
    NotEvaluable(String),

    /// Construction-time validation failed (non-unit normal, mismatched
    /// lengths, non-concurrent mirrors, duplicate points, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Serialized input could not be parsed; the string names the offending
    /// JSON path or CSV position.
    #[error("malformed input at {path}: {message}")]
    Malformed { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn malformed(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}
