use thiserror::Error;

/// Errors raised by every analysis in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input that violates an operation's precondition (shape, sector, hermiticity, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A quantity expected to vanish (or equal one) missed by more than the tolerance.
    #[error("tolerance violation in {what}: residual {residual:e}")]
    Tolerance { what: String, residual: f64 },

    /// Two routes that must agree disagreed; signals a numerical tolerance bug.
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    /// The state has an empty single-particle orthogonal complement and cannot be split.
    #[error("unsplittable: {0}")]
    Unsplittable(String),

    /// Malformed state or ensemble file.
    #[error("parse error in field `{field}`: {msg}")]
    Parse { field: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
