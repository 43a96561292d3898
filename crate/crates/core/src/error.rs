use thiserror::Error;

/// Errors produced by the geometry, solver and certification layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("set is empty")]
    EmptySet,

    #[error("invalid metric spec: {0}")]
    InvalidSpec(String),

    #[error("invalid set descriptor: {0}")]
    InvalidSet(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("unknown builtin map `{0}`")]
    UnknownMap(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("proximal subproblem infeasible: best value exceeds gap by {excess:e}")]
    SubproblemInfeasible { excess: f64 },

    #[error("proximal set is empty (gap not attained)")]
    EmptyProximalSet,

    #[error("start point is not in the proximal set (distance {distance} vs gap {gap})")]
    StartNotProximal { distance: f64, gap: f64 },

    #[error("map image leaves the target set at step {step}")]
    MapOutsideTarget { step: usize },

    #[error("no convergence after {iterations} iterations (last step {last_step:e}){}", if *.diverging { "; not a proximal contraction on this orbit" } else { "" })]
    NoConvergence {
        iterations: usize,
        last_step: f64,
        diverging: bool,
    },

    #[error("limit check failed: d(gx*, Tx*) exceeds gap by {excess:e}")]
    ResidualExceeded { excess: f64 },

    #[error("contraction constant must lie in [0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("missing prerequisite report `{0}`")]
    MissingReport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
