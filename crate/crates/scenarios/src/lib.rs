//! Scenario documents and their replay.
//!
//! A scenario is JSON (`"format": 1`, schema in `schemas/scenario.json`):
//! agents, the initial model, turns with gold operations and optional
//! expectations, and counterfactual retraction queries. The shipped
//! incident and design-review traces live under `data/`.

mod error;
pub mod grounding;
mod muddy;
mod replay;
mod scenario;

pub use error::{Result, ScenarioError};
pub use muddy::{dont_know, gen_muddy, muddy_schedule, FATHER};
pub use replay::{
    replay, replay_gold, run_counterfactual, run_counterfactuals, CounterfactualResult, Decision, Replay,
    ReplayReport, TurnReport,
};
pub use scenario::{
    AgentSpec, AtomSpec, Counterfactual, InitialArgument, InitialSpec, Scenario, ScenarioTurn, Surprise,
    SCENARIO_FORMAT,
};

pub const INCIDENT_JSON: &str = include_str!("../data/incident.json");
pub const DESIGN_REVIEW_JSON: &str = include_str!("../data/design_review.json");
pub const GROUNDING_JSON: &str = include_str!("../data/incident_grounding.json");

pub fn load_scenario(text: &str) -> Result<Scenario> {
    Scenario::from_json(text)
}

/// The incident-response trace.
pub fn incident() -> Scenario {
    load_scenario(INCIDENT_JSON).expect("shipped scenario is valid")
}

/// The design-review trace with the authoritative decision.
pub fn design_review() -> Scenario {
    load_scenario(DESIGN_REVIEW_JSON).expect("shipped scenario is valid")
}

/// Labelled grounding queries over the incident trace.
pub fn grounding_items() -> grounding::GroundingSet {
    grounding::GroundingSet::from_json(GROUNDING_JSON).expect("shipped item set is valid")
}
