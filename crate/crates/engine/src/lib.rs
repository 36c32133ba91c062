//! The per-conversation dependency structure and its update algebra.
//!
//! [`DependencyStructure::apply_turn`] takes the operations classified from
//! one utterance, checks each against its precondition and updates the
//! epistemic model, argument framework, commitments and dep map together.
//! [`verify`] and [`affected`] are pure reads over the result.

mod error;
mod ops;
mod render;
mod snapshot;
mod structure;
mod verify;

pub use error::{EngineError, Result};
pub use ops::{ArgSpec, Op, OpKind, ResolveMode, TurnOperation, Violation};
pub use render::{render_retraction, render_summary};
pub use snapshot::{
    diff_expected, snapshot, Expectation, FormulaCheck, Mismatch, OpenProblem, StateSnapshot, SNAPSHOT_FORMAT,
};
pub use structure::{DependencyStructure, TurnOutcome};
pub use verify::{
    affected, verify, verify_with, ClaimResolver, DecisionStage, Evidence, IdentityResolver, Verdict,
    VerifyOptions, VerifyResult,
};
