use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Vertex or edge indices that do not describe a graph.
    #[error("malformed graph: {0}")]
    Structure(String),

    /// Input outside the domain of an operation (unstable `(g, n)`,
    /// disconnected graph where a connected one is required, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two independent computations of the same quantity disagree.
    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
}
