use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("class size must be at least 1 (got 0)")]
    ZeroSize,
    #[error("character has infinite classes; operation requires omega_count = 0")]
    InfiniteClasses,
    #[error("character has no classes at all")]
    EmptyCharacter,
    #[error("inconsistent informant prefix at item {index}")]
    Inconsistent { index: usize },
    #[error("family precondition violated: {0}")]
    Precondition(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("family has no generator")]
    MissingGenerator,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("representation error: {0}")]
    Representation(String),
    #[error("character {0} has no eventually-periodic or ascending size sequence")]
    Unrepresentable(String),
    #[error("stream exhausted after {0} items")]
    StreamExhausted(usize),
    #[error("adversary could not find a legal witness to switch to at stage {stage}")]
    NoLegalWitness { stage: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
