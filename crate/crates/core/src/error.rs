use thiserror::Error;

/// Errors shared by every module of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("graph contains the triangle {0} {1} {2}")]
    Triangle(String, String, String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("enumeration refused: size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("invalid artifact: {0}")]
    Artifact(String),
}

pub type Result<T> = std::result::Result<T, Error>;
