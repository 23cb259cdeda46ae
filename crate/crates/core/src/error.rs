//! Error type shared across the crate.
//!
//! Every failure carries a category so that callers (the CLI in
//! particular) can map it to a stable exit code: parse errors are
//! malformed inputs, admissibility errors are traces or boundary data
//! violating the distance inequalities, level errors are requests below
//! the floor of the relevant equation, and consistency errors are
//! internal invariant violations that should never happen on valid
//! inputs.

use thiserror::Error;

/// Failure category, used to derive stable process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Malformed input file, reference or value.
    Parse,
    /// Trace or boundary data violating an admissibility inequality.
    Admissibility,
    /// Level below the floor of the equation (empty level set, negative
    /// cycle, bracket failure).
    Level,
    /// Internal invariant violated, or an operation invoked outside its
    /// contract.
    Consistency,
}

impl Category {
    /// Process exit code for the category.
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Parse => 2,
            Category::Admissibility => 3,
            Category::Level => 4,
            Category::Consistency => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("admissibility violation: {0}")]
    Admissibility(String),

    #[error("level error: {0}")]
    Level(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("misuse: {0}")]
    Misuse(String),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Parse(_) => Category::Parse,
            Error::Admissibility(_) => Category::Admissibility,
            Error::Level(_) => Category::Level,
            Error::Consistency(_) | Error::Misuse(_) => Category::Consistency,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
