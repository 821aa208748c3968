use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("torus period must be positive, got {0}")]
    NonPositivePeriod(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("component count mismatch: expected {expected}, got {got}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error("frequency ({0}, {1}) lies beyond the Nyquist limit {2}")]
    BeyondNyquist(f64, f64, f64),
    #[error("field contains NaN or infinite values")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("homogeneous block {0} lies below the lattice resolution")]
    BelowResolution(i32),
    #[error("field is not divergence free (relative residual {0:e})")]
    NotDivergenceFree(f64),
    #[error("low bump radius {radius} is below the resolvable minimum {min}")]
    Unresolvable { radius: f64, min: f64 },
    #[error("moment condition violated: perpendicular moment of the low bump vanishes")]
    MomentVanishes,
    #[error("support of {0} exceeds the grid Nyquist band")]
    BandOverflow(String),
    #[error("mechanism routes disagree: relative difference {0:e}")]
    RouteDisagreement(f64),
    #[error("time step violates the advective stability bound (CFL number {0})")]
    Unstable(f64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("non-monotone residuals: {0}")]
    NonMonotone(String),
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("bad file format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
