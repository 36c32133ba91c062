//! Acyclic argumentation frameworks with lifecycle-tagged arguments, a
//! dependency map and retraction.

mod dep;
mod error;
mod framework;
mod semantics;

pub use dep::{literal, Commitments, DepMap};
pub use error::{ArgError, Result};
pub use framework::{ArgFramework, ArgId, ArgStatus, ArgType, Argument};
pub use semantics::{
    affected, brute_force_extensions, current_extension, preferred_extension, retract, walk_deps,
    RetractMode, RetractionReport, StatusChange, BRUTE_FORCE_LIMIT,
};
