use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid has zero steps")]
    ZeroSteps,

    #[error("Euler step {step} (t = {time}) produced non-positive value {value}")]
    EulerNonPositive { step: usize, time: f64, value: f64 },

    #[error("non-positive PEA value {value} at grid point {index} (t = {time})")]
    NonPositivePea { index: usize, time: f64, value: f64 },

    #[error("no positive solution: {0}")]
    NoPositiveSolution(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("fit is underdetermined: need at least 2 distinct abscissae, got {0}")]
    Underdetermined(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
