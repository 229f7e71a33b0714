use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime in [2, 2^31)")]
    NotPrime(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("product of degrees ({0}, {1}) leaves the window")]
    OutOfWindow(i32, i32),

    #[error("element is not homogeneous")]
    NotHomogeneous,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A hypothesis of the requested check is not met.
    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("syzygy tower too shallow: need depth {required}, have {available}")]
    TowerDepth { required: usize, available: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
