use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs are inconsistent with each other or with a label space.
    #[error("configuration error: {0}")]
    Config(String),

    /// A bound's hypotheses do not hold for the given instance.
    #[error("{bound} is undefined: {reason}")]
    BoundUndefined { bound: String, reason: String },

    /// A mathematical invariant failed on data that passed validation.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Malformed input file.
    #[error("parse error in {source_name} at line {line}, column {column}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        column: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn undefined(bound: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::BoundUndefined {
            bound: bound.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
