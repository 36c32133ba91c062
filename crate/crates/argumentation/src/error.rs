use thiserror::Error;

use crate::framework::{ArgId, ArgStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArgError {
    #[error("duplicate argument id `{0}`")]
    DuplicateId(ArgId),
    #[error("unknown argument `{0}`")]
    UnknownArgument(ArgId),
    #[error("attack {attacker} -> {target} would close a cycle")]
    CycleIntroduced { attacker: ArgId, target: ArgId },
    #[error("attack graph is cyclic")]
    CyclicFramework,
    #[error("{0} arguments is too many for subset enumeration")]
    TooLarge(usize),
    #[error("argument `{id}` cannot go from {from} to {to}")]
    InvalidTransition { id: ArgId, from: ArgStatus, to: ArgStatus },
    #[error("argument `{id}` created at turn {turn}, after an argument from turn {previous}")]
    NonMonotoneTurn { id: ArgId, turn: u32, previous: u32 },
}

pub type Result<T, E = ArgError> = std::result::Result<T, E>;
