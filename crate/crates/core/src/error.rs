use thiserror::Error;

/// Errors raised by the coding library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum PolarError {
    #[error("transform depth n={0} is outside the supported range 0..={max}", max = crate::index::MAX_DEPTH)]
    DepthOutOfRange(usize),

    #[error("index {index} does not fit in {n} bits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("length {got} does not match block length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("frozen index {0} listed more than once")]
    DuplicateIndex(usize),

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("theta {0} is outside [-1, 1]")]
    ThetaOutOfRange(f64),

    #[error("prior {position} is not ternary (theta = {value})")]
    NonTernaryPrior { position: usize, value: f64 },

    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),

    #[error("list capacity exceeded: 2 * {lambda} > {capacity}")]
    ListCapacity { lambda: usize, capacity: usize },

    #[error("list size must be at least 1")]
    ZeroListSize,

    #[error("all path weights are zero")]
    DegenerateWeights,

    #[error("brute-force oracle limited to n <= {max}, got n = {n}", max = crate::oracle::MAX_ORACLE_DEPTH)]
    OracleTooLarge { n: usize },

    #[error("invalid code specification: {0}")]
    InvalidSpec(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid construction target: {0}")]
    InvalidTarget(String),

    #[error("invalid CRC configuration: {0}")]
    InvalidCrc(String),
}

pub type Result<T> = std::result::Result<T, PolarError>;
