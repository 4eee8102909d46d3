use thiserror::Error;

/// Errors raised by the library. Variants are grouped so that a front-end can
/// map them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field size {0} is not prime")]
    NonPrimeField(u32),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability table is not normalized (sum = {sum})")]
    Normalization { sum: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("unknown register or variable: {0}")]
    Unknown(String),

    #[error("unsupported request: {0}")]
    Unsupported(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("linear program defect: {0}")]
    LpDefect(String),
}

pub type Result<T> = std::result::Result<T, Error>;
