use argumentation::ArgError;
use epistemic_core::EpistemicError;
use thiserror::Error;

use crate::ops::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("precondition failed: {0}")]
    Precondition(Violation),
    #[error(transparent)]
    Epistemic(#[from] EpistemicError),
    #[error(transparent)]
    Argument(#[from] ArgError),
    #[error("`{0}` names no argument or atomic claim")]
    UnknownReference(String),
    #[error("no actual world declared")]
    NoActualWorld,
    #[error("the model has no worlds left")]
    Inconsistent,
    #[error("unsupported snapshot format {0}")]
    SnapshotFormat(u32),
    #[error("snapshot: {0}")]
    Snapshot(String),
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;
