use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },

    #[error("domain error in `{expr}` at {value}: {reason}")]
    Domain {
        expr: String,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("{0} is outside the domain of the inverse transform")]
    OutOfDomain(f64),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("bound horizon collapsed: {0}")]
    HorizonCollapse(String),

    #[error("not integrable near 0: {0}")]
    Integrability(String),

    #[error("no convergence after {iterations} iterations (last change {delta:e})")]
    NonConvergence { iterations: usize, delta: f64 },

    #[error("iterate blew up at t = {t} (value {value:e})")]
    BlowUp { t: f64, value: f64 },

    #[error("{0}")]
    Boundary(String),

    #[error("evaluation failed at t = {t}: {source}")]
    AtNode {
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
