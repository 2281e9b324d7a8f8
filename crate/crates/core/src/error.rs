use thiserror::Error;

/// Errors raised by state construction, measurement and simulation routines.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type used
/// for the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QndError {
    #[error("invalid dimension {dim}: at least {min} basis states are required")]
    InvalidDimension { dim: usize, min: usize },

    #[error(
        "truncation too small: dim {dim} leaves tail mass {tail:e}; at least {required} basis states are required"
    )]
    TruncationTooSmall { dim: usize, required: usize, tail: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("resolution must be strictly positive and finite, got {0}")]
    InvalidResolution(f64),

    #[error("invalid outcome grid: {0}")]
    InvalidGrid(String),

    #[error("outcome grid does not cover the distribution: {0}")]
    GridCoverage(String),

    #[error("outcome density {density:e} at a_m = {a_m} is too small to condition on")]
    VanishingDensity { a_m: f64, density: f64 },

    #[error("meter truncation too small: dim_m {dim_m} loses mass {tail:e}; at least {required} meter basis states are required")]
    MeterTruncation { dim_m: usize, required: usize, tail: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, QndError>;
