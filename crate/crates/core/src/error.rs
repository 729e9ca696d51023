use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("a fermionic system needs at least one mode")]
    NoModes,
    #[error("{modes} modes exceed the dense-representation cap of {cap}")]
    DenseCapExceeded { modes: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not a power of two")]
    NotFockDimension(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator trace {found} violates the required value {expected}")]
    BadTrace { expected: f64, found: f64 },
    #[error("operator is not positive semidefinite (eigenvalue below {0:e})")]
    NotPositive(f64),
    #[error("lowest eigenvalue is degenerate (gap {0:e})")]
    DegenerateGroundState(f64),
    #[error("matrix is not antisymmetric (deviation {0:e})")]
    NotAntisymmetric(f64),
    #[error("antisymmetric matrix has odd dimension {0}")]
    OddDimension(usize),
    #[error("Majorana index {index} out of range for {modes} modes")]
    IndexOutOfRange { index: usize, modes: usize },
    #[error("covariance matrix is unphysical (largest |lambda| = {0})")]
    Unphysical(f64),
    #[error("standard form failed to converge (residual {0:e})")]
    StandardForm(f64),
    #[error("state is singular or near-pure (smallest eigenvalue {0:e})")]
    SingularState(f64),
    #[error("alpha = {0} lies outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("invalid metric weights: {0}")]
    InvalidWeights(&'static str),
    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("jump rate {0} is negative")]
    NegativeRate(f64),
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(&'static str),
    #[error("integration aborted at t = {time}: {reason}")]
    IntegrationAborted { time: f64, reason: String },
    #[error("Gram matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("sample times differ at index {0}")]
    TimeGridMismatch(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
