use thiserror::Error;

/// Broad classification of an [`Error`], used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller supplied something malformed or out of range.
    Input,
    /// The request is well formed but exceeds a configured enumeration budget.
    Budget,
    /// An internal consistency check failed.
    Invariant,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("equation is not invariant: coefficients sum to {sum}")]
    NotInvariant { sum: i64 },
    #[error("coefficient {index} is zero")]
    ZeroCoefficient { index: usize },
    #[error("equation needs at least 3 variables, got {k}")]
    TooFewVariables { k: usize },
    #[error("coefficient magnitudes sum to more than {limit}")]
    CoefficientRange { limit: u64 },
    #[error("unsupported arity {k} (only 3 or 4 variables are supported here)")]
    UnsupportedArity { k: usize },
    #[error("{0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Budget(_) | Error::Overflow(_) => ErrorKind::Budget,
            Error::Invariant(_) => ErrorKind::Invariant,
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
