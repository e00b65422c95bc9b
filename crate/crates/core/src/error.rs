use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 1")]
    ZeroModulus,

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("operation requires an odd prime, got {0}")]
    NotOddPrime(u64),

    #[error("exponent must be at least 1")]
    ZeroExponent,

    #[error("modulus {n} exceeds the {engine} bound of {bound}")]
    TooLarge {
        n: u64,
        bound: u64,
        engine: &'static str,
    },

    #[error("pivot sub-permanent {value} is not a unit modulo {modulus}")]
    PivotNotUnit { value: u64, modulus: u64 },

    #[error("shift {x} is not divisible by {p}")]
    ShiftNotDivisible { x: u64, p: u64 },

    #[error("modulus mismatch: {expected} vs {actual}")]
    ModulusMismatch { expected: u64, actual: u64 },

    #[error("{p} does not divide the modulus {n}")]
    PrimeNotDividing { p: u64, n: u64 },

    #[error("a class label is required, got NonInvertible")]
    NonInvertibleLabel,

    #[error("inexact division in closed form: {0}")]
    InexactDivision(String),

    #[error("tally overflowed 64 bits")]
    TallyOverflow,

    #[error("invalid matrix literal {literal:?}: {reason}")]
    BadMatrixLiteral { literal: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
