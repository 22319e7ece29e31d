use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NstError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is rank deficient (pivot ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("selected columns are linearly dependent (pivot ratio {ratio:e})")]
    SingularSubmatrix { ratio: f64 },

    #[error("sparsity {s} exceeds vector length {len}")]
    SparsityTooLarge { s: usize, len: usize },

    #[error("power iteration did not converge; best estimate {estimate}")]
    NonConvergence { estimate: f64 },

    #[error("exhaustive enumeration of {supports} supports exceeds cap {cap}")]
    CombinatorialBlowup { supports: u128, cap: u128 },

    #[error("operator is not a Parseval frame (max |AA* - I| = {deviation:e})")]
    NotParseval { deviation: f64 },

    #[error("convergence condition not met (rho = {rho})")]
    ConditionNotMet { rho: f64 },

    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for NstError {
    fn from(e: std::io::Error) -> Self {
        NstError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NstError>;
