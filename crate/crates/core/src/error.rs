use thiserror::Error;

/// Errors produced by grid construction, operator application, spectral
/// queries and the CG solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("frequency index {index:?} out of range 1..={n}")]
    IndexOutOfRange { index: Vec<usize>, n: usize },

    #[error("resource cap exceeded: {required} entries required, {allowed} allowed")]
    ResourceCap { required: u128, allowed: u128 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical breakdown at iteration {iteration}: {reason}")]
    Breakdown { iteration: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
