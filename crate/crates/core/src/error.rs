use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector length {len} is not 2^n for any n >= 1")]
    NotPowerOfTwo { len: usize },

    #[error("state norm {norm} deviates from 1 by more than the accepted tolerance")]
    BadNorm { norm: f64 },

    #[error("invalid subsystem: {0}")]
    InvalidSubsystem(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("density matrix invariant violated: {0}")]
    NotDensityMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
