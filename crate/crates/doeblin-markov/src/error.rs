use thiserror::Error;

/// Errors produced by construction and by the numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square and non-empty")]
    NotSquare,

    #[error("row {row} sums to {sum}, further than 1e-9 from 1")]
    RowSumOffOne { row: usize, sum: f64 },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("weights sum to {sum}, further than 1e-9 from 1")]
    WeightSumOffOne { sum: f64 },

    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("state labels must be non-empty and pairwise distinct")]
    InvalidStateSpace,

    #[error("state index {index} out of range for {dim} states")]
    StateOutOfRange { index: usize, dim: usize },

    #[error("linear system is singular; the chain is reducible or has no unique stationary distribution")]
    SingularSystem,

    #[error("alpha = 0: the chain has no memory-breaker component and the approximation bound is vacuous")]
    NoMemoryBreaker,

    #[error("requested alpha {requested} exceeds the Doeblin coefficient {max}")]
    AlphaTooLarge { requested: f64, max: f64 },

    #[error("run-cap probability is zero: every admissible composition is excluded and the bound is vacuous")]
    VacuousBound,

    #[error("{0}")]
    InvalidParameter(String),

    #[error("target set must be a single state for clump-heuristic parameters; pass explicit (lambda, rho) instead")]
    NonSingletonTarget,
}

pub type Result<T> = std::result::Result<T, Error>;
