use thiserror::Error;

/// Errors raised by the groove library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or quadrature ran out of its iteration budget.
    #[error("iteration limit reached in {what} after {iterations} iterations (partial value {partial}, last increment {last_increment:e})")]
    IterationLimit {
        what: &'static str,
        iterations: usize,
        partial: f64,
        last_increment: f64,
    },

    /// Inconsistent solver or run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// The time integrator produced non-finite values.
    #[error("divergence at step {step} (t = {time}): {detail}")]
    Divergence {
        step: usize,
        time: f64,
        detail: String,
    },

    /// A linear system that should be regular turned out singular.
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
