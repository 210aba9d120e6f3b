use thiserror::Error;

/// Errors raised by geometry, selection, solver and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not orthonormal (residual {residual:.3e} > {tolerance:.1e})")]
    NotOrthonormal { residual: f64, tolerance: f64 },

    #[error("matrix is not skew-symmetric (residual {0:.3e})")]
    NotSkew(f64),

    #[error("tangent vector is not anchored at the given point: {0}")]
    BaseMismatch(String),

    #[error("invalid Givens coefficients: {0}")]
    InvalidGivens(String),

    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("matrix logarithm outside the principal branch (an eigenvalue is within tolerance of -1)")]
    LogBranch,

    #[error("point lies on the cut locus of the base point")]
    CutLocus,

    #[error("operation not supported on this geometry: {0}")]
    Unsupported(&'static str),

    #[error("map is not an isometry (metric distortion {0:.3e})")]
    NotIsometric(f64),

    #[error("objective returned a non-finite value")]
    NonFinite,

    #[error("no smoothness constant available for block {0}")]
    MissingSmoothness(usize),

    #[error("step size underflow after {halvings} halvings (gradient inconsistent with objective?)")]
    StepUnderflow { halvings: usize },

    #[error("sufficient decrease violated at outer {outer}, inner {inner}: residual {residual:.3e}")]
    DecreaseViolated {
        outer: usize,
        inner: usize,
        residual: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
