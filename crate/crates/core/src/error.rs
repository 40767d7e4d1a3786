//! Error types shared across the crate.

use thiserror::Error;

/// Arithmetic-level failures: inputs leaving `Z_(3)` or division by non-units.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("input is not 3-locally integral: {0}")]
    NonIntegralInput(String),
    #[error("not invertible in Z_(3): {0}")]
    NonInvertible(String),
}

/// Structural failures of the higher-level operations.
#[derive(Debug, Error)]
pub enum Q2Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("division by a non-unit, non-monomial element: {0}")]
    NonInvertibleDenominator(String),
    #[error("invalid generator index: {0}")]
    InvalidIndex(String),
    #[error("closed-form and map-then-project routes disagree: {0}")]
    FormulaMismatch(String),
    #[error("cobar lift does not hit the required image: {0}")]
    LiftFailure(String),
    #[error("brute-force oracle state space too large: {0}")]
    SizeLimitExceeded(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Q2Error>;
