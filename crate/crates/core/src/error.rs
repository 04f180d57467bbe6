use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrime(u32),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("modulus {modulus:?} is reducible over F_{p}")]
    ReducibleModulus { p: u32, modulus: Vec<u32> },

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("no built-in modulus for q = {0}; supply one explicitly")]
    NoBuiltinModulus(u64),

    #[error("field order {0} exceeds the supported maximum of 256")]
    FieldTooLarge(u64),

    #[error("division by zero in the field")]
    DivisionByZero,

    #[error("invalid field element index {index} for q = {q}")]
    InvalidElement { index: u64, q: u64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{what} = {value} is outside the valid range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("{what}: size {size} exceeds the enumeration guard {limit}")]
    GuardExceeded {
        what: &'static str,
        size: String,
        limit: String,
    },

    #[error("dimension R*mn = {0} is not an integer")]
    NonIntegralDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(what: &'static str, value: usize, min: usize, max: usize) -> Result<()> {
    if value < min || value > max {
        Err(Error::OutOfRange {
            what,
            value: value as i64,
            min: min as i64,
            max: max as i64,
        })
    } else {
        Ok(())
    }
}
