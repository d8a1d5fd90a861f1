use thiserror::Error;

/// Failures raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point {x} lies outside [0, {ceiling}]")]
    OutOfDomain { x: f64, ceiling: f64 },
    #[error("iterate {step} falls in the hole")]
    Hole { step: usize },
    #[error("iterate {step} falls in the gap of the two-sided map")]
    Gap { step: usize },
    #[error("orbit too short: needed {needed} steps, have {available}")]
    InsufficientOrbit { needed: usize, available: usize },
    #[error("series diverges at lambda = {lambda}")]
    NotSummable { lambda: f64 },
    #[error("bracket [{lo}, {hi}] does not enclose the root after tail correction")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("orbit of zero never enters the hole")]
    InfiniteOrbit,
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("estimate is degenerate: {0}")]
    DegenerateEstimate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
