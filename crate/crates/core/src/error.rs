use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A stepper produced a non-finite value, the usual symptom of running
    /// outside the stability region.
    #[error("numerical overflow at step {step} (t = {time})")]
    Overflow { step: usize, time: f64 },

    #[error("stability condition violated: tau = {tau} exceeds the limit {limit} (sigma_max = {sigma})")]
    Unstable { tau: f64, limit: f64, sigma: f64 },

    #[error("linear solver breakdown: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
