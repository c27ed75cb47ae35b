//! Error taxonomy for the whole crate.
//!
//! Errors fall into two process-level classes, which the CLI maps to exit
//! codes:
//!
//! * **Input validation** (`exit 1`): the caller handed us something that is
//!   not a valid problem instance — a malformed file, a surface violating its
//!   structural constraints, an unachievable perturbation threshold.
//! * **Internal consistency** (`exit 2`): a cross-check *inside* the engine
//!   failed. Every such check guards an identity that holds mathematically,
//!   so tripping one always indicates a bug, never bad input.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or semantically invalid input (file, flag, or surface data).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The staged coefficient-growth search could not reach the required
    /// threshold at the named surface degree with either candidate.
    #[error("no candidate at surface degree {degree} reaches the threshold {threshold}")]
    ThresholdUnachievable { degree: usize, threshold: String },

    /// An internal identity that must hold by construction failed.
    /// Always a bug in this crate.
    #[error("internal consistency check failed: {0}")]
    Internal(String),

    /// Exact division was requested where the divisor does not divide.
    #[error("exact division failed: {0}")]
    Indivisible(String),

    /// Division by an exact zero scalar.
    #[error("division by zero in exact scalar arithmetic")]
    DivisionByZero,

    /// I/O failure while reading or writing a requested file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: `1` for bad input, `2` for bugs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::ThresholdUnachievable { .. }
            | Error::Io(_)
            | Error::Json(_) => 1,
            Error::Internal(_) | Error::Indivisible(_) | Error::DivisionByZero => 2,
        }
    }

    /// Shorthand used by internal cross-checks.
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Shorthand for input-validation failures.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
