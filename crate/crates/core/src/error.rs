use alloc::string::String;

/// Errors raised by the algebraic and numerical layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not in su(N): {0}")]
    NotInAlgebra(&'static str),
    #[error("matrix is not in SU(N): {0}")]
    NotInGroup(&'static str),
    #[error("logarithm branch failure: eigenvalue phase within {tolerance:e} of the cut")]
    BranchCut { tolerance: f64 },
    #[error("chart is singular: eigenvalue gap of the logarithm reaches 2*pi")]
    SingularChart,
    #[error("arity mismatch: form has arity {expected}, got {found} tangents")]
    ArityMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("point too close to the simplex boundary for a finite-difference step of {step:e}")]
    SimplexBoundary { step: f64 },
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("genus must be at least 2, got {0}")]
    InvalidGenus(usize),
    #[error("invalid generator index {index} for genus {genus}")]
    InvalidGenerator { index: usize, genus: usize },
    #[error("polynomial degree {degree} outside 1..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("quadrature exact to degree {exact} cannot integrate degree {needed}")]
    QuadratureOrder { exact: usize, needed: usize },
    #[error("quadrature did not converge (last change {change:e})")]
    QuadratureNonConvergence { change: f64 },
    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("ill-conditioned kernel: singular value gap {gap:e} below threshold")]
    IllConditioned { gap: f64 },
    #[error("no shipped seed solution for N={n}, genus={genus}, beta index {beta}")]
    NoSeed { n: usize, genus: usize, beta: i64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;
