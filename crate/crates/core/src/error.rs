use thiserror::Error;

/// Errors reported by model construction, solvers, and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("{k} communities do not evenly divide {n} nodes")]
    Unbalanced { n: usize, k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires a zero-inflated Gaussian weight law, got {0}")]
    UnsupportedLaw(&'static str),

    #[error("size {n} exceeds the exhaustive enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    #[error("no node pairs in the {0} class")]
    EmptyPairClass(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
