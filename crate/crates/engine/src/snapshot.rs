use std::collections::{BTreeMap, BTreeSet};

use argumentation::{ArgId, ArgStatus};
use epistemic_core::Formula;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::structure::DependencyStructure;

pub const SNAPSHOT_FORMAT: u32 = 1;

/// Versioned persistence document. The summary fields are derived from
/// `structure` and exist for assertions and human readers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub format: u32,
    pub turn: u32,
    pub world_count: usize,
    pub statuses: BTreeMap<ArgId, ArgStatus>,
    pub extension: BTreeSet<ArgId>,
    pub deps: BTreeMap<ArgId, BTreeSet<String>>,
    pub commitments: BTreeMap<String, BTreeSet<ArgId>>,
    pub open_problems: Vec<OpenProblem>,
    pub structure: DependencyStructure,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpenProblem {
    pub agent: String,
    pub observation: Formula,
}

pub fn snapshot(d: &DependencyStructure) -> Result<StateSnapshot> {
    Ok(StateSnapshot {
        format: SNAPSHOT_FORMAT,
        turn: d.turn,
        world_count: d.model.world_count(),
        statuses: d.af.args().iter().map(|a| (a.id.clone(), a.status)).collect(),
        extension: d.current_extension()?,
        deps: d.dep.deps.clone(),
        commitments: d.cm.by_agent.clone(),
        open_problems: d
            .open_problems()
            .map(|p| OpenProblem { agent: p.agent.clone(), observation: p.observation.clone() })
            .collect(),
        structure: d.clone(),
    })
}

impl StateSnapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Probe {
            format: u32,
        }
        let probe: Probe = serde_json::from_str(text).map_err(|e| EngineError::Snapshot(e.to_string()))?;
        if probe.format != SNAPSHOT_FORMAT {
            return Err(EngineError::SnapshotFormat(probe.format));
        }
        serde_json::from_str(text).map_err(|e| EngineError::Snapshot(e.to_string()))
    }
}

/// A formula expected to hold (or not) at the evaluation world.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub formula: Formula,
    pub holds: bool,
}

/// Assertions on a snapshot. Absent fields are not checked.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world_count: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub statuses: BTreeMap<ArgId, ArgStatus>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub in_extension: BTreeSet<ArgId>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub out_extension: BTreeSet<ArgId>,
    /// Exact dep sets.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub deps: BTreeMap<ArgId, BTreeSet<String>>,
    /// Number of open abductive problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open_problems: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub commitments_include: BTreeMap<String, BTreeSet<ArgId>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub commitments_exclude: BTreeMap<String, BTreeSet<ArgId>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attacks_include: Vec<(ArgId, ArgId)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formulas: Vec<FormulaCheck>,
}

impl Expectation {
    pub fn is_empty(&self) -> bool {
        *self == Expectation::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub field: String,
    pub expected: String,
    pub actual: String,
}

fn show<T: std::fmt::Debug>(v: T) -> String {
    format!("{v:?}")
}

pub fn diff_expected(snap: &StateSnapshot, expected: &Expectation) -> Vec<Mismatch> {
    let mut out = vec![];
    let mut push = |field: String, e: String, a: String| out.push(Mismatch { field, expected: e, actual: a });
    if let Some(n) = expected.world_count {
        if n != snap.world_count {
            push("world_count".into(), n.to_string(), snap.world_count.to_string());
        }
    }
    for (id, s) in &expected.statuses {
        let actual = snap.statuses.get(id);
        if actual != Some(s) {
            push(format!("statuses.{id}"), s.to_string(), actual.map_or("missing".into(), |a| a.to_string()));
        }
    }
    for id in &expected.in_extension {
        if !snap.extension.contains(id) {
            push(format!("in_extension.{id}"), "in".into(), "out".into());
        }
    }
    for id in &expected.out_extension {
        if snap.extension.contains(id) {
            push(format!("out_extension.{id}"), "out".into(), "in".into());
        }
    }
    for (id, deps) in &expected.deps {
        let actual = snap.deps.get(id);
        if actual != Some(deps) {
            push(format!("deps.{id}"), show(deps), actual.map_or("missing".into(), show));
        }
    }
    if let Some(n) = expected.open_problems {
        if n != snap.open_problems.len() {
            push("open_problems".into(), n.to_string(), snap.open_problems.len().to_string());
        }
    }
    let empty = BTreeSet::new();
    for (agent, ids) in &expected.commitments_include {
        let have = snap.commitments.get(agent).unwrap_or(&empty);
        for id in ids.difference(have) {
            push(format!("commitments.{agent}.{id}"), "committed".into(), "absent".into());
        }
    }
    for (agent, ids) in &expected.commitments_exclude {
        let have = snap.commitments.get(agent).unwrap_or(&empty);
        for id in ids.intersection(have) {
            push(format!("commitments.{agent}.{id}"), "absent".into(), "committed".into());
        }
    }
    for (a, t) in &expected.attacks_include {
        if !snap.structure.af.attacks_pair(a, t) {
            push(format!("attacks.{a}->{t}"), "present".into(), "absent".into());
        }
    }
    let d = &snap.structure;
    for check in &expected.formulas {
        let actual = d.eval_world().ok().and_then(|w| d.model.eval(w, &check.formula).ok());
        if actual != Some(check.holds) {
            push(
                format!("formulas.{}", check.formula),
                check.holds.to_string(),
                actual.map_or("unevaluable".into(), |v| v.to_string()),
            );
        }
    }
    out
}
