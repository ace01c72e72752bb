use alloc::boxed::Box;
use alloc::string::String;

use thiserror::Error;

use crate::convexity::CriticalRun;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrownError {
    #[error("unsupported group family `{0}`")]
    UnsupportedFamily(String),

    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("invalid omega spec: {0}")]
    InvalidOmega(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular to working precision")]
    SingularInput,

    #[error("matrix is not an element of the group (residual {residual:e})")]
    NotInGroup { residual: f64 },

    #[error("non-positive pivot {pivot:e} at index {index} of a real LDLᵀ factorization")]
    NumericalBreakdown { index: usize, pivot: f64 },

    #[error("direction lies outside Ω (margin {margin:e})")]
    OmegaViolation { margin: f64 },

    #[error("leading minor {index} degenerated at path parameter t = {t}")]
    BranchBreakdown { index: usize, t: f64 },

    #[error("pivot {index} vanished (|pivot| = {magnitude:e})")]
    PivotBreakdown { index: usize, magnitude: f64 },

    #[error("matrix is not symmetric (residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("rejection sampler stalled (acceptance rate {rate:e})")]
    RejectionStall { rate: f64 },

    #[error("f_(a,λ) picked up a non-real part {0:e}; the logarithm branch is broken")]
    NonRealValue(f64),

    #[error("gradient ascent did not converge in {} iterations", .0.iterations)]
    NoConvergence(Box<CriticalRun>),

    #[error("point already lies inside the orbit hull")]
    InsideHull,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, CrownError>;
