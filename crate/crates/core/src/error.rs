use thiserror::Error;

use crate::word::Word;

/// Errors produced by shift, potential and report construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shift: {0}")]
    InvalidShift(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid word `{0}`: {1}")]
    InvalidWord(String, String),

    #[error("word {0} is not allowable")]
    NotAllowable(Word),

    #[error("ladder index {index} out of range (ladder has {len} levels)")]
    LevelOutOfRange { index: usize, len: usize },

    #[error("{what} budget exceeded: {count} > {cap}")]
    BudgetExceeded {
        what: &'static str,
        count: u128,
        cap: u128,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A combinatorial condition (irreducibility, specification) is not met.
    #[error("condition failed: {0}")]
    Condition(String),

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
