use thiserror::Error;

/// Every failure the library can report.
///
/// The CLI prints [`LabError::name`] verbatim on stderr and maps
/// [`LabError::exit_code`] to the process status.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("grid side {n} is below the minimum of {min}")]
    GridTooSmall { n: usize, min: usize },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("out of bounds: {0}")]
    OutOfBounds(String),
    #[error("singularity center ({x}, {y}) is not strictly inside the grid")]
    InvalidCenter { x: usize, y: usize },
    #[error("|xi * h| = {value:.3} exceeds the exponent guard of 700")]
    WeightOverflow { value: f64 },
    #[error("vertex ({x}, {y}) is outside the region")]
    VertexOutsideRegion { x: usize, y: usize },
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),
    #[error("the ball touches the grid border")]
    BallTouchesBorder,
    #[error("mask is empty")]
    EmptyMask,
    #[error("random walk budget exhausted after {attempts} attempts")]
    WalkBudgetExceeded { attempts: u64 },
    #[error("target set is empty")]
    EmptyTargetSet,
    #[error("no path from the source to ({x}, {y})")]
    NoPath { x: usize, y: usize },
    #[error("path does not cross the annulus [{r1}, {r2}]")]
    PathMissesAnnulus { r1: f64, r2: f64 },
    #[error("harmonic solve did not reach residual {tolerance:e} within {iterations} sweeps")]
    IterationLimit { iterations: usize, tolerance: f64 },
    #[error("need at least {min} samples, got {got}")]
    InsufficientSamples { got: usize, min: usize },
    #[error("assertion failed: {0}")]
    AssertionFailed(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// Stable variant name, used on stderr by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            LabError::GridTooSmall { .. } => "GridTooSmall",
            LabError::InvalidSpec(_) => "InvalidSpec",
            LabError::OutOfBounds(_) => "OutOfBounds",
            LabError::InvalidCenter { .. } => "InvalidCenter",
            LabError::WeightOverflow { .. } => "WeightOverflow",
            LabError::VertexOutsideRegion { .. } => "VertexOutsideRegion",
            LabError::InsufficientResolution(_) => "InsufficientResolution",
            LabError::BallTouchesBorder => "BallTouchesBorder",
            LabError::EmptyMask => "EmptyMask",
            LabError::WalkBudgetExceeded { .. } => "WalkBudgetExceeded",
            LabError::EmptyTargetSet => "EmptyTargetSet",
            LabError::NoPath { .. } => "NoPath",
            LabError::PathMissesAnnulus { .. } => "PathMissesAnnulus",
            LabError::IterationLimit { .. } => "IterationLimit",
            LabError::InsufficientSamples { .. } => "InsufficientSamples",
            LabError::AssertionFailed(_) => "AssertionFailed",
            LabError::Format(_) => "Format",
            LabError::Config(_) => "Config",
            LabError::Io(_) => "Io",
        }
    }

    /// 2 for precondition/config errors, 3 for runtime numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::WeightOverflow { .. }
            | LabError::BallTouchesBorder
            | LabError::WalkBudgetExceeded { .. }
            | LabError::NoPath { .. }
            | LabError::PathMissesAnnulus { .. }
            | LabError::IterationLimit { .. }
            | LabError::AssertionFailed(_)
            | LabError::Io(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
