//! Crate-wide error type.

use std::fmt;

/// Errors produced by factorization primitives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operand shapes do not conform.
    DimensionMismatch {
        context: &'static str,
        detail: String,
    },
    /// A parameter is outside its documented range.
    InvalidArgument {
        context: &'static str,
        detail: String,
    },
    /// A norm that must be positive is zero.
    ZeroNorm { context: &'static str },
    /// Exhaustive enumeration was requested for too many variables.
    EnumerationTooLarge { variables: usize, limit: usize },
    /// Checkpoint or report file could not be written.
    Io {
        context: &'static str,
        detail: String,
    },
}

impl Error {
    pub(crate) fn dims(context: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(context: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidArgument {
            context,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { context, detail } => {
                write!(f, "{context}: dimension mismatch: {detail}")
            }
            Error::InvalidArgument { context, detail } => {
                write!(f, "{context}: invalid argument: {detail}")
            }
            Error::ZeroNorm { context } => {
                write!(f, "{context}: matrix has zero norm")
            }
            Error::EnumerationTooLarge { variables, limit } => {
                write!(
                    f,
                    "exact enumeration over {variables} variables exceeds the limit of {limit}"
                )
            }
            Error::Io { context, detail } => write!(f, "{context}: {detail}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
