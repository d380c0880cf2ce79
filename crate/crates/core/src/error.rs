use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("profile does not match game: {0}")]
    DimensionMismatch(String),

    #[error("game is not strictly ordinal: {0}")]
    NotStrictlyOrdinal(String),

    #[error("unsupported game shape: {0}")]
    UnsupportedShape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown learner `{0}`")]
    UnknownLearner(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("play failed: {0}")]
    PlayFailed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
