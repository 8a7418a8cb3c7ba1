use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("information length {k} out of range for block length {n}")]
    DimensionOutOfRange { k: usize, n: usize },

    #[error("invalid information set: {0}")]
    InvalidInfoSet(String),

    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bit {bit} at frozen position {index} differs from frozen value {frozen}")]
    FrozenViolation { index: usize, bit: u8, frozen: u8 },

    #[error("oracle size guard: {0}")]
    SizeGuard(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
