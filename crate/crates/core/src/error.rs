use crate::seqdb::ItemId;

/// Errors raised by parsing, configuration and mining.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("sequence file line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("utility table line {line}: {message}")]
    UtilityTable { line: usize, message: String },

    #[error("item {0} has no external utility")]
    MissingUtility(ItemId),

    #[error("duplicate sequence id {0}")]
    DuplicateSid(u32),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("candidate set exceeds the cap of {limit} patterns")]
    CandidateCap { limit: usize },

    #[error("pattern has more than {limit} embeddings")]
    EmbeddingCap { limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
