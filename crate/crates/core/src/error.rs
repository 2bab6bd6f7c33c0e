use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("characteristic 2 is not supported")]
    EvenPrime,

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("{what} = {value} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("division by zero")]
    DivisionByZero,

    #[error("{k} is not invertible modulo {m}")]
    NotCoprime { k: u64, m: u64 },

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    #[error("invalid field element: {0}")]
    InvalidElement(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
