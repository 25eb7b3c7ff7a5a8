use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed functionality-distribution text.
    #[error("parse error: {0}")]
    Parse(String),

    /// An iterative solver failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The master-equation integrator lost mass beyond tolerance.
    #[error("integration unstable at t = {t}: mass drift {drift:e} for functionality {functionality} (dt = {dt})")]
    Integration {
        t: f64,
        dt: f64,
        functionality: usize,
        drift: f64,
    },

    /// Two size-distribution backends disagree.
    #[error("backends {left} and {right} disagree at n = {n}: {left_value:e} vs {right_value:e}")]
    Consistency {
        n: usize,
        left: &'static str,
        right: &'static str,
        left_value: f64,
        right_value: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
