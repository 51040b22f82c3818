use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid generator letter {0:?} (expected 0, 1 or 2)")]
    InvalidLetter(char),

    #[error("malformed word: {0}")]
    MalformedWord(String),

    #[error("flag index {flag} out of range for {size} flags")]
    FlagOutOfRange { flag: usize, size: usize },

    #[error("unknown tiling {0:?}")]
    UnknownTiling(String),

    #[error("invalid map data: {0}")]
    InvalidMap(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource cap of {cap} {what} exceeded")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("bounded search failed: {0}")]
    SearchExhausted(String),

    #[error("elements belong to different maps")]
    MismatchedMaps,

    #[error("{0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
