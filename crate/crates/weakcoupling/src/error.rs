use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("model has no Fourier transform: {0}")]
    UnsupportedModel(String),
    #[error("potential is not radial")]
    NotRadial,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("no root of p at level {level} ({branch} branch)")]
    RootNotFound { level: f64, branch: &'static str },
    #[error("shift e must be positive, got {0}")]
    NonPositiveShift(f64),
    #[error("shift e = {0} is below the resolvable floor")]
    BelowFloor(f64),
    #[error("operator size {size} exceeds the dense limit {limit}")]
    SizeExceeded { size: usize, limit: usize },
    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("Krylov iteration did not converge after {iterations} restarts (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("shell grading insufficient: self-test change {0:e}")]
    GradingInsufficient(f64),
    #[error("resolution exceeded: {0}")]
    ResolutionExceeded(String),
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("eigenvector overlap {0} below 0.5")]
    BranchMismatch(f64),
    #[error("contour passes within {distance:e} of an eigenvalue")]
    ContourTooClose { distance: f64 },
    #[error("contour integral not integral: deviation {0:e}")]
    NonIntegerRank(f64),
    #[error("oscillatory quadrature cannot certify scale R = {0}")]
    ScaleTooLarge(f64),
    #[error("cap placement failed: placed {placed} of {requested}")]
    PlacementFailed { placed: usize, requested: usize },
    #[error("box too small: {0}")]
    BoxTooSmall(String),
}

pub type Result<T> = std::result::Result<T, Error>;
