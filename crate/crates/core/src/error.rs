use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid initial data: {0}")]
    InvalidInitialData(&'static str),
    #[error("time must be finite, got {0}")]
    NonFiniteTime(f64),
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(
        "grid [{x_min}, {x_max}] truncates the state at t = {t}: edge |beta x + eps| = {reach:.3} < {required:.3}"
    )]
    TruncatedGrid {
        x_min: f64,
        x_max: f64,
        t: f64,
        reach: f64,
        required: f64,
    },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("Simpson quadrature needs an odd number of points, got {0}")]
    EvenCount(usize),
    #[error("invalid time sequence: {0}")]
    InvalidTimes(String),
    #[error("wavefunction leaks through the boundary: |psi| = {magnitude:e} at x = {x}")]
    BoundaryLeak { x: f64, magnitude: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
