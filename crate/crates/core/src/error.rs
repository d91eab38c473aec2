use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (max |U^dag U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is singular or ill-conditioned (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("invalid system type: {0}")]
    InvalidType(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("channel invariant violated: {quantity} = {value:e} exceeds tolerance {tol:e}")]
    Invariant {
        quantity: String,
        value: f64,
        tol: f64,
    },

    #[error("Kraus operators are not complete (max |sum K^dag K - I| = {deviation:e})")]
    IncompleteKraus { deviation: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("wire error: {0}")]
    Wire(String),

    #[error("enumeration too large: {0} strategies (limit {1})")]
    TooLarge(u128, u128),

    #[error("unknown identifier: {0}")]
    Unknown(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
