use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NcolError {
    #[error("alpha must lie in (0, 2), got {0}")]
    InvalidAlpha(f64),
    #[error("invalid masses: {0}")]
    InvalidMass(String),
    #[error("invalid body count N = {0}")]
    InvalidN(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("collision configuration: minimum pairwise distance {0:e}")]
    CollisionConfiguration(f64),
    #[error("configuration is the zero vector")]
    ZeroConfiguration,
    #[error("configuration is not central: constrained gradient residual {0:e}")]
    NotCentral(f64),
    #[error("variation is not tangent to the ellipsoid: constraint residual {0:e}")]
    NotTangent(f64),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("solver approached a collision (minimum distance {0:e})")]
    ConvergedToCollision(f64),
    #[error("no sign change on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("step size underflow at tau = {tau} (h = {h:e})")]
    StepFailure { tau: f64, h: f64 },
    #[error("ellipsoid projection correction {correction:e} at tau = {tau}")]
    EllipsoidDrift { tau: f64, correction: f64 },
    #[error("radial coordinate does not decrease: {0}")]
    NonCollapsing(String),
    #[error("horizon too short to estimate limits: {0}")]
    InsufficientHorizon(String),
    #[error("variation support [{lo}, {hi}] exceeds trajectory horizon [{t0}, {t1}]")]
    SupportOutOfRange { lo: f64, hi: f64, t0: f64, t1: f64 },
    #[error("bump supports overlap: {0}")]
    OverlappingSupports(String),
    #[error("trajectory is not homographic: |s'| = {0:e}")]
    NotHomographic(f64),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("lemma check not satisfied on grid: {0}")]
    NotSatisfiedOnGrid(String),
    #[error("initial data rejected: {0}")]
    RejectedInitialData(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, NcolError>;

impl From<std::io::Error> for NcolError {
    fn from(e: std::io::Error) -> Self {
        NcolError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for NcolError {
    fn from(e: serde_json::Error) -> Self {
        NcolError::Parse(e.to_string())
    }
}

impl From<csv::Error> for NcolError {
    fn from(e: csv::Error) -> Self {
        NcolError::Io(e.to_string())
    }
}
