//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("q = {q} is not prime; extension fields are unsupported in the simulator")]
    NonPrimeModulus { q: u32 },

    #[error("modulus must be at least 2, got {q}")]
    ModulusTooSmall { q: u32 },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("matrix shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("{what} = {value} out of range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },

    #[error("{what} = {value} outside domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("enumeration budget exceeded: {limiting} = {required} > budget {budget}")]
    BudgetExceeded {
        limiting: String,
        required: u128,
        budget: u128,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported radial profile for this operation: {0}")]
    UnsupportedProfile(String),

    #[error("root finding failed: {0}")]
    RootSearch(String),

    #[error("unknown verifier: {0}")]
    UnknownVerifier(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
