use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {index} is out of range 0..={max}")]
    IndexOutOfRange {
        name: &'static str,
        index: usize,
        max: usize,
    },

    #[error("chain length index N = {0} must satisfy 1 <= N <= {max}", max = crate::MAX_N)]
    ChainLength(usize),

    #[error("beta must be nonzero for revival predictions")]
    ZeroBeta,

    #[error("invalid rational {0:?}")]
    InvalidRational(String),

    #[error("invalid scan window: {0}")]
    InvalidScan(String),

    #[error("tolerance {0} outside (0, 0.1]")]
    InvalidTolerance(f64),

    #[error("time must be finite, got {0}")]
    NonFiniteTime(f64),

    #[error("prediction is for {expected}, chain gives {actual}")]
    Inconsistent { expected: String, actual: String },

    #[error("prediction kind None has nothing to verify")]
    NothingToVerify,
}
