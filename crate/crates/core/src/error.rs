use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("genericity failure: {0}")]
    Genericity(String),

    #[error(transparent)]
    Parse(#[from] crate::parser::ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
