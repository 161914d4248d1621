//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors raised by validation, parsing, and the search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty distribution")]
    Empty,

    #[error("non-finite entry at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("negative entry at index {index}: {value}")]
    Negative { index: usize, value: f64 },

    #[error("not normalized: entries sum to {sum}")]
    NotNormalized { sum: f64 },

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{name} out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("brute-force cost {cost:e} exceeds the limit {limit:e}")]
    CostBound { cost: f64, limit: f64 },

    #[error("at t = {t}: {source}")]
    AtPoint {
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
