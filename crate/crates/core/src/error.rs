use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} needs {requested} elements, cap is {cap}")]
    SizeCap {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("degree sum {0} is odd")]
    OddDegreeSum(u64),

    #[error("rooted graph with {vertices} vertices exceeds the general isomorphism cap of {cap}")]
    IsomorphismTooLarge { vertices: usize, cap: usize },

    #[error("isomorphism search exceeded its budget of {0} nodes")]
    SearchBudget(usize),

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("non-finite state at step {step}, vertex {vertex}")]
    NonFinite { step: usize, vertex: usize },

    #[error("numerical diagnostic failed: {0}")]
    Diagnostic(String),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures raised by a numerical routine rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::NonFinite { .. } | Error::Diagnostic(_)
        )
    }
}
