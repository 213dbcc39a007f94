use thiserror::Error;

/// Errors produced by the numerical routines and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method or quadrature did not reach its tolerance.
    /// `estimate` and `error` carry the best result obtained.
    #[error("no convergence in {routine}: estimate {estimate:e}, error {error:e}")]
    Convergence {
        routine: String,
        estimate: f64,
        error: f64,
    },

    /// A Monte-Carlo experiment was configured so that its result is unusable.
    #[error("experiment design error: {0}")]
    ExperimentDesign(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(routine: &str, estimate: f64, error: f64) -> Self {
        Error::Convergence {
            routine: routine.to_string(),
            estimate,
            error,
        }
    }

    /// Prefix the message with the location that produced it.
    pub fn annotate(self, context: &str) -> Self {
        match self {
            Error::Domain(m) => Error::Domain(format!("{context}: {m}")),
            Error::ExperimentDesign(m) => Error::ExperimentDesign(format!("{context}: {m}")),
            Error::Internal(m) => Error::Internal(format!("{context}: {m}")),
            Error::Convergence {
                routine,
                estimate,
                error,
            } => Error::Convergence {
                routine: format!("{context}: {routine}"),
                estimate,
                error,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
