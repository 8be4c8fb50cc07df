use thiserror::Error;

use crate::constructor::ApproxReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown density family `{0}`")]
    UnknownDensity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },

    #[error("density is zero on every lattice point of the ball of radius {radius}")]
    ZeroOnBall { radius: f64 },

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("density `{0}` must be continuous for this operation")]
    ContinuityRequired(String),

    #[error("no bandwidth up to k = {last_k} reached the target (last measured error {last_error:e})")]
    BandwidthNotFound { last_k: f64, last_error: f64 },

    #[error("cell weights exceed unit mass (remainder weight {remainder:e})")]
    QuadratureInconsistency { remainder: f64 },

    #[error("kernel is zero on every ball up to radius {radius}")]
    ZeroKernel { radius: f64 },

    #[error("quadrature did not reach tolerance {tol:e} within its budget (error estimate {estimate:e})")]
    QuadratureBudget { tol: f64, estimate: f64 },

    #[error("component budget {budget} exceeded: {needed} cells needed at delta = {delta:e}")]
    BudgetExceeded { budget: usize, needed: usize, delta: f64 },

    #[error("kernel `{0}` has no essential bound")]
    EssBoundRequired(String),

    #[error("measured error {measured:e} exceeds eps = {eps:e}")]
    ToleranceNotMet {
        measured: f64,
        eps: f64,
        report: Box<ApproxReport>,
    },
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownDensity(_) => "UnknownDensity",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DimensionError { .. } => "DimensionError",
            Error::ZeroOnBall { .. } => "ZeroOnBall",
            Error::ParseError(_) => "ParseError",
            Error::InvalidMixture(_) => "InvalidMixture",
            Error::ContinuityRequired(_) => "ContinuityRequired",
            Error::BandwidthNotFound { .. } => "BandwidthNotFound",
            Error::QuadratureInconsistency { .. } => "QuadratureInconsistency",
            Error::ZeroKernel { .. } => "ZeroKernel",
            Error::QuadratureBudget { .. } => "QuadratureBudget",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::EssBoundRequired(_) => "EssBoundRequired",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionError { expected, got })
    }
}
