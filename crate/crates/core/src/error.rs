use thiserror::Error;

/// Errors raised by the analysis operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain (e.g. `t <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at the pole of a linear-fractional map.
    #[error("pole: denominator vanishes at x = {0}")]
    Pole(String),

    /// The pole `-d/c` lies inside (or on the boundary of) the working interval.
    #[error("pole inside interval [{left}, {right}]")]
    PoleInInterval { left: String, right: String },

    /// The identity map has every point fixed.
    #[error("degenerate map: {0}")]
    Degenerate(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Floating point overflow or non-finite intermediate.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A checked property of the construction was found violated.
    #[error("property violation: {0}")]
    PropertyViolation(String),

    /// Text could not be parsed as a rational, word, or similar value.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
