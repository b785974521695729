use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("unrealizable: {0}")]
    Unrealizable(String),
    #[error("graph has no edges")]
    EdgelessGraph,
    #[error("giant component has fewer than 2 nodes")]
    TrivialGiant,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("malformed curve: {0}")]
    MalformedCurve(String),
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("network has no assertions")]
    EmptyNetwork,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
