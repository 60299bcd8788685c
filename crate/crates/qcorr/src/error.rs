use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a precondition: malformed file, non-Hermitian observable,
    /// invalid state, non-isometric matrix, and so on.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Operand shapes are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A numerical procedure broke down despite valid inputs.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the CLI: 2 for invalid input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalFailure(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
