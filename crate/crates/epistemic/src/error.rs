use thiserror::Error;

use crate::model::WorldId;

/// Faults raised by model construction and formula evaluation.
///
/// `UnknownAtom`, `UnknownWorld` and `UnknownAgent` indicate caller bugs.
/// `NoOpExpansion` and `NoOpenProblem` are the two recoverable signals the
/// engine turns into re-prompts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpistemicError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown world {0}")]
    UnknownWorld(WorldId),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("atom `{0}` is already registered and every listed agent is aware of it")]
    NoOpExpansion(String),
    #[error("no open abductive problem for {0}")]
    NoOpenProblem(String),
    #[error("{0} atoms is too many for explicit world enumeration (limit {1})")]
    TooManyAtoms(usize, usize),
    #[error("invalid model: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, EpistemicError>;
