//! Explicit-world epistemic plausibility models.
//!
//! A model holds a proposition registry, a set of worlds with total
//! valuations, per-agent integer plausibility ranks (lower is more
//! plausible), per-agent indistinguishability cells and per-agent awareness
//! sets. Every update returns a new model.

mod abduction;
mod error;
mod formula;
mod model;

pub use abduction::{
    check_abductive_solution, evaluate_solution, AbductionVerdict, AbductiveProblem, ProblemStatus, Rejection,
    TrivialityClause,
};
pub use error::{EpistemicError, Result};
pub use formula::Formula;
pub use model::{Atom, AtomKind, CellSpec, EpistemicModel, World, WorldId, MAX_ENUMERATED_ATOMS};

/// Truth of `phi` at `world`.
pub fn eval_formula(model: &EpistemicModel, world: WorldId, phi: &Formula) -> Result<bool> {
    model.eval(world, phi)
}

/// `!psi`. See [`EpistemicModel::announce`].
pub fn announce_hard(model: &EpistemicModel, psi: &Formula) -> Result<EpistemicModel> {
    model.announce(psi)
}

/// `⇑psi`. See [`EpistemicModel::upgrade_lexicographic`].
pub fn upgrade_lexicographic(model: &EpistemicModel, psi: &Formula) -> Result<EpistemicModel> {
    model.upgrade_lexicographic(psi)
}

/// `↑psi`. See [`EpistemicModel::upgrade_conservative`].
pub fn upgrade_conservative(model: &EpistemicModel, psi: &Formula) -> Result<EpistemicModel> {
    model.upgrade_conservative(psi)
}

/// See [`EpistemicModel::expand_awareness`].
pub fn expand_awareness(model: &EpistemicModel, agents: &[String], p: Atom) -> Result<EpistemicModel> {
    model.expand_awareness(agents, p)
}

/// Standard muddy-children model: `n` children named `a`, `b`, …, atoms
/// `m_a`, `m_b`, … (observable), each child seeing every forehead but its own.
pub fn muddy_children_model(n: usize) -> Result<EpistemicModel> {
    let agents: Vec<String> = (0..n).map(child_name).collect();
    let registry = agents.iter().map(|a| Atom::new(format!("m_{a}"), AtomKind::Observable)).collect();
    let masks = agents
        .iter()
        .map(|a| (a.clone(), agents.iter().filter(|b| *b != a).map(|b| format!("m_{b}")).collect()))
        .collect();
    EpistemicModel::new(registry, agents, &CellSpec::Masks(masks))
}

/// `a`, `b`, … `j` for indices below 26.
pub fn child_name(i: usize) -> String {
    char::from(b'a' + u8::try_from(i).expect("fewer than 26 children")).to_string()
}
