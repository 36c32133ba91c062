use std::collections::{BTreeMap, BTreeSet};

use argumentation::{literal, ArgType, Argument, RetractMode};
use engine::{DependencyStructure, Expectation, Op, TurnOperation};
use epistemic_core::{Atom, AtomKind, CellSpec, EpistemicModel, Formula};
use interpreter::{ClassifiedTurn, WireOp};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScenarioError};

pub const SCENARIO_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub format: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub agents: Vec<AgentSpec>,
    pub initial: InitialSpec,
    pub turns: Vec<ScenarioTurn>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterfactuals: Vec<Counterfactual>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub role: String,
    /// May resolve authoritatively.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub authority: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub id: String,
    pub kind: AtomKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialArgument {
    pub id: String,
    pub claim: Formula,
    pub speaker: String,
    pub arg_type: ArgType,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deps: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub committed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub atoms: Vec<AtomSpec>,
    /// Atoms each agent can see; absent means every announcement is public
    /// and nothing is privately visible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masks: Option<BTreeMap<String, BTreeSet<String>>>,
    /// Truth values of atoms in the actual world, including atoms that only
    /// enter later.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual: Option<BTreeMap<String, bool>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arguments: Vec<InitialArgument>,
    /// Checked before the first turn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Surprise {
    pub agent: String,
    pub chi: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioTurn {
    pub id: u32,
    pub speaker: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub text: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub simultaneous: bool,
    /// Surprise checks run against the structure before the turn applies.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surprise: Vec<Surprise>,
    pub gold_ops: Vec<WireOp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expectation>,
}

impl ScenarioTurn {
    pub fn operations(&self) -> Vec<TurnOperation> {
        self.gold_ops
            .iter()
            .map(|w| TurnOperation {
                speaker: w.speaker.clone().unwrap_or_else(|| self.speaker.clone()),
                op: w.op.clone(),
                turn_text: self.text.clone(),
            })
            .collect()
    }
}

/// A retraction query. References name an argument id or an atomic claim,
/// resolved against the final structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterfactual {
    pub retract: String,
    #[serde(default = "direct", skip_serializing_if = "is_direct")]
    pub mode: RetractMode,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub expect_affected: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub expect_unaffected: BTreeSet<String>,
    /// The affected set must equal `expect_affected`, not just contain it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub expect_reinstated: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub expect_no_longer_accepted: BTreeSet<String>,
    /// Lines that must appear in the rendered retraction.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect_rendering: Vec<String>,
}

fn direct() -> RetractMode {
    RetractMode::Direct
}

fn is_direct(m: &RetractMode) -> bool {
    *m == RetractMode::Direct
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Probe {
            format: Option<u32>,
        }
        let probe: Probe = serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        match probe.format {
            Some(SCENARIO_FORMAT) => {}
            Some(f) => return Err(ScenarioError::invalid("format", format!("unsupported format {f}"))),
            None => return Err(ScenarioError::invalid("format", "missing")),
        }
        let s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn agent_ids(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.id.clone()).collect()
    }

    /// Declared atoms plus every atom an operation introduces.
    pub fn known_atoms(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.initial.atoms.iter().map(|a| a.id.clone()).collect();
        for t in &self.turns {
            for w in &t.gold_ops {
                match &w.op {
                    Op::ExpandAwareness { atom, .. } => {
                        out.insert(atom.clone());
                    }
                    Op::Hypothesize { gamma, .. } => {
                        out.insert(gamma.clone());
                    }
                    _ => {}
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let agents: BTreeSet<&str> = self.agents.iter().map(|a| a.id.as_str()).collect();
        if agents.is_empty() {
            return Err(ScenarioError::invalid("agents", "no agents"));
        }
        if agents.len() != self.agents.len() {
            return Err(ScenarioError::invalid("agents", "duplicate agent id"));
        }
        let mut declared = BTreeSet::new();
        for (i, a) in self.initial.atoms.iter().enumerate() {
            if !declared.insert(a.id.as_str()) {
                return Err(ScenarioError::invalid(format!("initial.atoms[{i}].id"), format!("duplicate `{}`", a.id)));
            }
        }
        let known = self.known_atoms();
        let check_atom = |path: String, atom: &str| -> Result<()> {
            if known.contains(atom) {
                Ok(())
            } else {
                Err(ScenarioError::invalid(path, format!("unknown atom `{atom}`")))
            }
        };
        let check_agent = |path: String, agent: &str| -> Result<()> {
            if agents.contains(agent) {
                Ok(())
            } else {
                Err(ScenarioError::invalid(path, format!("unknown agent `{agent}`")))
            }
        };
        if let Some(masks) = &self.initial.masks {
            for (agent, atoms) in masks {
                check_agent(format!("initial.masks.{agent}"), agent)?;
                for a in atoms {
                    if !declared.contains(a.as_str()) {
                        return Err(ScenarioError::invalid(
                            format!("initial.masks.{agent}"),
                            format!("`{a}` is not an initial atom"),
                        ));
                    }
                }
            }
        }
        for atom in self.initial.actual.iter().flat_map(|m| m.keys()) {
            check_atom(format!("initial.actual.{atom}"), atom)?;
        }
        for (i, arg) in self.initial.arguments.iter().enumerate() {
            let path = format!("initial.arguments[{i}]");
            check_agent(format!("{path}.speaker"), &arg.speaker)?;
            for c in &arg.committed {
                check_agent(format!("{path}.committed"), c)?;
            }
            for d in &arg.deps {
                check_atom(format!("{path}.deps"), literal(d).0)?;
            }
        }
        if let Some(e) = &self.initial.expected {
            check_expectation("initial.expected", e, &check_atom)?;
        }
        for (i, t) in self.turns.iter().enumerate() {
            let path = format!("turns[{i}]");
            if t.id as usize != i + 1 {
                return Err(ScenarioError::invalid(format!("{path}.id"), format!("expected {}, found {}", i + 1, t.id)));
            }
            check_agent(format!("{path}.speaker"), &t.speaker)?;
            if t.gold_ops.is_empty() {
                return Err(ScenarioError::invalid(format!("{path}.gold_ops"), "no operations"));
            }
            for (j, w) in t.gold_ops.iter().enumerate() {
                if let Some(s) = &w.speaker {
                    check_agent(format!("{path}.gold_ops[{j}].speaker"), s)?;
                }
            }
            for (j, s) in t.surprise.iter().enumerate() {
                check_agent(format!("{path}.surprise[{j}].agent"), &s.agent)?;
                for a in s.chi.atoms() {
                    check_atom(format!("{path}.surprise[{j}].chi"), &a)?;
                }
            }
            if let Some(e) = &t.expected {
                check_expectation(&format!("{path}.expected"), e, &check_atom)?;
            }
        }
        for (i, c) in self.counterfactuals.iter().enumerate() {
            check_atom(format!("counterfactuals[{i}].retract"), &c.retract)?;
        }
        Ok(())
    }

    /// The structure before turn 1.
    pub fn initial_structure(&self) -> Result<DependencyStructure> {
        let registry: Vec<Atom> = self
            .initial
            .atoms
            .iter()
            .map(|a| Atom::new(&a.id, a.kind).with_label(a.label.clone()))
            .collect();
        let cells = match &self.initial.masks {
            Some(m) => CellSpec::Masks(m.clone()),
            None => CellSpec::Public,
        };
        let model = EpistemicModel::new(registry, self.agent_ids(), &cells)?;
        let mut d = DependencyStructure::new(model)
            .with_authorities(self.agents.iter().filter(|a| a.authority).map(|a| a.id.clone()));
        if let Some(actual) = &self.initial.actual {
            d = d.with_ground_truth(actual.clone());
        }
        for a in &self.initial.arguments {
            let arg = Argument::new(&a.id, a.claim.clone(), &a.speaker, 0, a.arg_type);
            d.add_initial_argument(arg, &a.deps, &a.committed)?;
        }
        Ok(d)
    }

    /// Gold labels in the form the scripted interpreter replays.
    pub fn gold_turns(&self) -> Vec<ClassifiedTurn> {
        self.turns
            .iter()
            .map(|t| ClassifiedTurn {
                turn_id: t.id,
                operations: t.operations(),
                simultaneous: t.simultaneous,
                raw_response: None,
            })
            .collect()
    }
}

fn check_expectation(path: &str, e: &Expectation, check_atom: &dyn Fn(String, &str) -> Result<()>) -> Result<()> {
    for (arg, deps) in &e.deps {
        for d in deps {
            check_atom(format!("{path}.deps.{arg}"), literal(d).0)?;
        }
    }
    for (i, f) in e.formulas.iter().enumerate() {
        for a in f.formula.atoms() {
            check_atom(format!("{path}.formulas[{i}]"), &a)?;
        }
    }
    Ok(())
}
