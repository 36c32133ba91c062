//! Labelled grounding queries against replayed states.

use std::collections::BTreeMap;
use std::fmt;

use engine::{verify_with, DecisionStage, DependencyStructure, Verdict, VerifyOptions};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    /// Continuations the structure supports at that turn.
    Actual,
    /// Re-assertions of a claim after it was abandoned.
    Stale,
    /// Claims from a different conversation.
    CrossConversation,
    /// Claims contradicting what was established.
    Counterfactual,
}

impl Category {
    pub const ALL: [Category; 4] =
        [Category::Actual, Category::Stale, Category::CrossConversation, Category::Counterfactual];

    pub fn name(self) -> &'static str {
        match self {
            Category::Actual => "actual",
            Category::Stale => "stale",
            Category::CrossConversation => "cross_conversation",
            Category::Counterfactual => "counterfactual",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundingItem {
    pub id: String,
    pub category: Category,
    /// The state queried is the one after this turn.
    pub turn: u32,
    /// The candidate continuation.
    pub text: String,
    /// The claim id the continuation asserts.
    pub claim: String,
    pub label: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundingSet {
    pub format: u32,
    pub scenario: String,
    pub items: Vec<GroundingItem>,
}

impl GroundingSet {
    pub fn from_json(text: &str) -> Result<Self> {
        let set: GroundingSet = serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        if set.format != crate::SCENARIO_FORMAT {
            return Err(ScenarioError::invalid("format", format!("unsupported format {}", set.format)));
        }
        for (i, item) in set.items.iter().enumerate() {
            if set.items[..i].iter().any(|o| o.id == item.id) {
                return Err(ScenarioError::invalid(format!("items[{i}].id"), format!("duplicate `{}`", item.id)));
            }
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemOutcome {
    pub id: String,
    pub category: Category,
    pub verdict: Verdict,
    pub correct: bool,
    pub decided_at: DecisionStage,
}

/// Verifies every item against `state_at(item.turn)`.
pub fn evaluate<'a>(
    items: &[GroundingItem],
    state_at: impl Fn(u32) -> &'a DependencyStructure,
    opts: VerifyOptions,
) -> Vec<ItemOutcome> {
    items
        .iter()
        .map(|item| {
            let d = state_at(item.turn);
            let r = verify_with(&item.claim, d, opts, &engine::IdentityResolver)
                .expect("verify reads an acyclic framework");
            ItemOutcome {
                id: item.id.clone(),
                category: item.category,
                verdict: r.verdict,
                correct: r.verdict == item.label,
                decided_at: r.decided_at,
            }
        })
        .collect()
}

/// Fraction correct per category; categories without items are absent.
pub fn accuracy_by_category(outcomes: &[ItemOutcome]) -> BTreeMap<Category, f64> {
    let mut tally: BTreeMap<Category, (usize, usize)> = BTreeMap::new();
    for o in outcomes {
        let e = tally.entry(o.category).or_default();
        e.0 += usize::from(o.correct);
        e.1 += 1;
    }
    tally.into_iter().map(|(c, (ok, n))| (c, ok as f64 / n as f64)).collect()
}
