use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a score sequence needs at least one team")]
    EmptySequence,

    #[error("score {value} at position {position} is outside [0, {max}] for {teams} teams")]
    ScoreOutOfRange {
        position: usize,
        value: i64,
        max: u32,
        teams: usize,
    },

    #[error("scores must be nondecreasing, but position {position} is smaller than position {}", position - 1)]
    NotNondecreasing { position: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("result matrix is incomplete: match ({row}, {col}) has no result")]
    IncompleteMatrix { row: usize, col: usize },

    #[error("size mismatch: expected {expected} teams, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("malformed store file, line {line}: {reason}")]
    MalformedStore { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
