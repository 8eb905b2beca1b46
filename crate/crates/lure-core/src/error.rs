use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries: {0}")]
    NonFinite(String),

    #[error("eigenvalue solver failed: {0}")]
    EigenvalueFailure(String),

    #[error("coordinate transform is singular or ill-conditioned (cond = {cond:.3e})")]
    SingularTransform { cond: f64 },

    #[error("evaluation point {point} is within {tol:.3e} of the spectrum")]
    PoleProximity { point: String, tol: f64 },

    #[error("transfer matrix does not have full normal column rank (rank {rank} < {cols})")]
    NotFullColumnRank { rank: usize, cols: usize },

    #[error("LMI precondition violated: max eigenvalue {max_eig:.3e} exceeds tolerance {tol:.3e}")]
    LmiInfeasible { max_eig: f64, tol: f64 },

    #[error("all {0} grid points fell within the pole exclusion zone")]
    AllPointsSkipped(usize),

    #[error("theorem hypotheses violated: {0}")]
    HypothesesViolated(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid multiplier combination: {0}")]
    InvalidMultipliers(String),

    #[error("state norm exceeded {threshold:.3e} at t = {time:.6}")]
    DivergenceDetected {
        time: f64,
        threshold: f64,
        partial: Box<crate::nonlinear::Trajectory>,
    },

    #[error("decay rate unresolvable: {0}")]
    RateUnresolvable(String),

    #[error("trajectory too short: {0}")]
    TrajectoryTooShort(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
