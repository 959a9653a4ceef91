use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature did not converge: requested {requested:e}, achieved {achieved:e} after {evals} evaluations")]
    Convergence {
        requested: f64,
        achieved: f64,
        evals: usize,
    },
    #[error("coefficient does not exist: {0}")]
    Existence(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Unsupported(_) => "unsupported",
            Error::Convergence { .. } => "convergence",
            Error::Existence(_) => "existence",
            Error::Range(_) => "range",
            Error::Consistency(_) => "consistency",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
