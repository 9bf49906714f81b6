use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of a geometric or radio formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A network or parameter set violates a structural invariant.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("network generation failed: {0}")]
    Generation(String),

    #[error("routing failed: {0}")]
    Routing(String),

    #[error("user {0} has no valid path to a core base station")]
    NoValidPath(NodeId),

    #[error("failed to parse network file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
