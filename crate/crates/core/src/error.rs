use thiserror::Error;

/// Errors raised by the algebra, module and verifier layers.
///
/// Failed hypotheses of an inequality are normally reported inside a
/// [`Certificate`](crate::Certificate); the `Hypothesis` variant is only used
/// by operations that cannot produce a meaningful result without them
/// (extraction, reconstruction).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("element is not positive: smallest eigenvalue {lambda_min:e}")]
    Positivity { lambda_min: f64 },

    #[error("hypothesis `{hypothesis}` fails by {deviation:e}")]
    Hypothesis { hypothesis: String, deviation: f64 },

    #[error("unsupported operation: {0}")]
    Capability(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
