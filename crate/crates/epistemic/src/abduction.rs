use serde::{Deserialize, Serialize};

use crate::error::{EpistemicError, Result};
use crate::formula::Formula;
use crate::model::{EpistemicModel, WorldId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemStatus {
    Open,
    Closed,
}

/// Queue entry `(Bᵢ, χ)`: agent `i` holds a surprising observation `χ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbductiveProblem {
    pub agent: String,
    pub observation: Formula,
    pub status: ProblemStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_by: Option<String>,
    /// Turn at which the problem was enqueued.
    #[serde(default)]
    pub opened_at: u32,
}

impl AbductiveProblem {
    pub fn open(agent: impl Into<String>, observation: Formula, turn: u32) -> Self {
        AbductiveProblem {
            agent: agent.into(),
            observation,
            status: ProblemStatus::Open,
            closed_by: None,
            opened_at: turn,
        }
    }

    pub fn is_open(&self) -> bool {
        self.status == ProblemStatus::Open
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrivialityClause {
    /// γ = χ
    EqualsObservation,
    /// Bᵢγ already holds.
    AlreadyBelieved,
    /// γ = ⊤
    Tautology,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    Consistency,
    Explanatory,
    NonTriviality(TrivialityClause),
}

impl Rejection {
    pub fn name(&self) -> &'static str {
        match self {
            Rejection::Consistency => "consistency",
            Rejection::Explanatory => "explanatory",
            Rejection::NonTriviality(_) => "non-triviality",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbductionVerdict {
    Accept,
    Reject(Rejection),
}

impl AbductionVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, AbductionVerdict::Accept)
    }
}

/// Checks γ against an open problem `(agent, χ)` in `queue`.
pub fn check_abductive_solution(
    model: &EpistemicModel,
    world: WorldId,
    queue: &[AbductiveProblem],
    agent: &str,
    chi: &Formula,
    gamma: &Formula,
) -> Result<AbductionVerdict> {
    let chi_c = chi.canonical();
    if !queue.iter().any(|p| p.is_open() && p.agent == agent && p.observation.canonical() == chi_c) {
        return Err(EpistemicError::NoOpenProblem(chi.to_string()));
    }
    evaluate_solution(model, world, agent, chi, gamma)
}

/// The three conditions, evaluated at `world`, reporting the first failure:
/// consistency `¬Bᵢ¬γ`; explanatory `Bᵢχ` after `⇑γ`; non-triviality
/// `γ ≠ χ`, `¬Bᵢγ`, `γ ≠ ⊤`.
pub fn evaluate_solution(
    model: &EpistemicModel,
    world: WorldId,
    agent: &str,
    chi: &Formula,
    gamma: &Formula,
) -> Result<AbductionVerdict> {
    if model.eval(world, &Formula::believes(agent, Formula::not(gamma.clone())))? {
        return Ok(AbductionVerdict::Reject(Rejection::Consistency));
    }
    let upgraded = model.upgrade_lexicographic(gamma)?;
    if !upgraded.eval(world, &Formula::believes(agent, chi.clone()))? {
        return Ok(AbductionVerdict::Reject(Rejection::Explanatory));
    }
    let gamma_c = gamma.canonical();
    let clause = if gamma_c == chi.canonical() {
        Some(TrivialityClause::EqualsObservation)
    } else if model.eval(world, &Formula::believes(agent, gamma.clone()))? {
        Some(TrivialityClause::AlreadyBelieved)
    } else if gamma_c == Formula::Top {
        Some(TrivialityClause::Tautology)
    } else {
        None
    };
    Ok(match clause {
        Some(c) => AbductionVerdict::Reject(Rejection::NonTriviality(c)),
        None => AbductionVerdict::Accept,
    })
}
