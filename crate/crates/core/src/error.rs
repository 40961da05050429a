use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GwError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("immersion degenerates at parameter point {point:?}")]
    Degenerate { point: Vec<f64> },
    #[error("derivatives of order {requested} requested but the chart supports only {supported}")]
    Capability { requested: usize, supported: usize },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("non-finite value at quadrature node {index} (parameter point {point:?})")]
    NonFinite { index: usize, point: Vec<f64> },
    #[error("perturbation step {step} is too large: {reason}")]
    StepTooLarge { step: f64, reason: String },
    #[error("ill-conditioned fit (condition number {0:.3e})")]
    Conditioning(f64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, GwError>;
