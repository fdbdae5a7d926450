use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the modelling, identification and design routines.
///
/// Variants are split into two families: input problems (bad arguments,
/// malformed files) and numerical failures (non-convergence, singular
/// systems). [`Error::is_numerical`] tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency {omega} rad/s outside the valid domain: {reason}")]
    Domain { omega: f64, reason: String },

    #[error("transfer function has a pole at omega = {omega} rad/s (|D| = {modulus:e})")]
    PoleAtFrequency { omega: f64, modulus: f64 },

    #[error("regressor is rank deficient; dependent columns {columns:?}")]
    RankDeficient { columns: Vec<usize> },

    #[error(
        "root finder did not converge after {iterations} iterations (max residual {residual:e})"
    )]
    RootsNotConverged { iterations: usize, residual: f64 },

    #[error("prediction-error minimisation did not converge after {iterations} iterations (best loss {best_loss:e})")]
    NotConverged {
        iterations: usize,
        best_loss: f64,
        best: Box<crate::sysid_time::FitResult>,
    },

    #[error("normal equations are singular; retry with stacked aggregation")]
    SingularSummed,

    #[error("ill-posed discretisation: instantaneous coefficient {coefficient:e} is too small, reduce the step size")]
    IllPosed { coefficient: f64 },

    #[error("unstable initialisation could not be repaired: {0}")]
    UnstableInit(String),

    #[error("model file: {0}")]
    Format(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of a numerical procedure, false for input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::PoleAtFrequency { .. }
                | Error::RankDeficient { .. }
                | Error::RootsNotConverged { .. }
                | Error::NotConverged { .. }
                | Error::SingularSummed
                | Error::IllPosed { .. }
                | Error::UnstableInit(_)
        )
    }
}
