use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("boundary action did not stabilize within {cap} letters")]
    CapExceeded { cap: usize },
    #[error("unknown generator letter {letter:?} at position {position}")]
    UnknownLetter { letter: char, position: usize },
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("companion table of radius {radius} too small for section of length {needed}")]
    NeedsLargerTable { radius: usize, needed: usize },
    #[error("element of the walk support is missing from the growth table")]
    MissingLength,
    #[error("relator failed to verify as identity: {0}")]
    RelatorFailed(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
