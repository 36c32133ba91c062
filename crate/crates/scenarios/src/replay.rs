use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use argumentation::{retract, ArgId};
use engine::{
    diff_expected, render_retraction, render_summary, snapshot, DependencyStructure, Expectation, Mismatch,
    Violation,
};
use interpreter::{reprompt_loop, Interpreter, InterpreterConfig, ScriptedInterpreter, Utterance};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::{Counterfactual, Scenario};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnReport {
    pub id: u32,
    pub speaker: String,
    pub applied: bool,
    pub attempts: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<Mismatch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub created: Vec<ArgId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub summary: String,
}

impl TurnReport {
    pub fn passed(&self) -> bool {
        self.applied && self.mismatches.is_empty()
    }
}

/// One affected/unaffected call on a referenced argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub reference: String,
    pub argument: Option<ArgId>,
    pub expected_affected: bool,
    pub affected: bool,
}

impl Decision {
    pub fn correct(&self) -> bool {
        self.argument.is_some() && self.expected_affected == self.affected
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterfactualResult {
    pub retract: String,
    pub affected: BTreeSet<ArgId>,
    pub decisions: Vec<Decision>,
    pub reinstated: BTreeSet<ArgId>,
    pub no_longer_accepted: BTreeSet<ArgId>,
    pub rendering: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl CounterfactualResult {
    pub fn correct_decisions(&self) -> usize {
        self.decisions.iter().filter(|d| d.correct()).count()
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.decisions.iter().all(Decision::correct)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initial_mismatches: Vec<Mismatch>,
    pub turns: Vec<TurnReport>,
    /// Before turn 1, then after every turn.
    pub world_counts: Vec<usize>,
    pub counterfactuals: Vec<CounterfactualResult>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.initial_mismatches.is_empty()
            && self.turns.iter().all(TurnReport::passed)
            && self.counterfactuals.iter().all(CounterfactualResult::passed)
    }

    pub fn mismatch_count(&self) -> usize {
        self.initial_mismatches.len()
            + self.turns.iter().map(|t| t.mismatches.len() + usize::from(!t.applied)).sum::<usize>()
            + self.counterfactuals.iter().map(|c| c.mismatches.len()).sum::<usize>()
    }

    pub fn reprompts(&self) -> u32 {
        self.turns.iter().map(|t| t.attempts.saturating_sub(1)).sum()
    }

    /// `(correct, total)` over all counterfactual decisions.
    pub fn decision_score(&self) -> (usize, usize) {
        self.counterfactuals
            .iter()
            .fold((0, 0), |(c, n), r| (c + r.correct_decisions(), n + r.decisions.len()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A finished replay: the report, the structure after every turn (index 0
/// is the initial structure) and per-turn wall times, which stay out of the
/// report so reports compare byte for byte.
#[derive(Debug, Clone)]
pub struct Replay {
    pub report: ReplayReport,
    pub states: Vec<DependencyStructure>,
    pub timings: Vec<Duration>,
}

impl Replay {
    pub fn final_state(&self) -> &DependencyStructure {
        self.states.last().expect("initial state always present")
    }

    /// The structure after turn `t` (`0` for the initial one), clamped to the
    /// last turn.
    pub fn state_at(&self, t: u32) -> &DependencyStructure {
        &self.states[(t as usize).min(self.states.len() - 1)]
    }
}

fn check(d: &DependencyStructure, expected: Option<&Expectation>) -> Vec<Mismatch> {
    let Some(e) = expected else { return vec![] };
    match snapshot(d) {
        Ok(snap) => diff_expected(&snap, e),
        Err(err) => vec![Mismatch { field: "snapshot".into(), expected: "snapshot".into(), actual: err.to_string() }],
    }
}

/// Applies each turn through `interp`, checks declared expectations, then
/// runs the counterfactual queries on the final structure. Mismatches and
/// failed turns are recorded; a failed turn leaves the structure as it was.
pub fn replay(s: &Scenario, interp: &mut dyn Interpreter, config: &InterpreterConfig) -> Result<Replay> {
    let mut d = s.initial_structure()?;
    let initial_mismatches = check(&d, s.initial.expected.as_ref());
    let mut world_counts = vec![d.model.world_count()];
    let mut states = vec![d.clone()];
    let mut turns = vec![];
    let mut timings = vec![];
    for t in &s.turns {
        let mut report = TurnReport {
            id: t.id,
            speaker: t.speaker.clone(),
            applied: false,
            attempts: 0,
            violations: vec![],
            mismatches: vec![],
            created: vec![],
            warnings: vec![],
            error: None,
            summary: String::new(),
        };
        let start = Instant::now();
        let mut scanned = d.clone();
        let mut scan_error = None;
        for sp in &t.surprise {
            if let Err(e) = scanned.surprise_scan(&sp.chi, &sp.agent) {
                scan_error = Some(format!("surprise scan: {e}"));
            }
        }
        let utt = Utterance {
            turn_id: t.id,
            speaker: t.speaker.clone(),
            text: t.text.clone(),
            simultaneous: t.simultaneous,
        };
        match reprompt_loop(interp, &utt, &scanned, config) {
            Ok(out) => {
                timings.push(start.elapsed());
                report.applied = scan_error.is_none();
                report.error = scan_error;
                report.attempts = out.attempts;
                report.violations = out.violations;
                report.created = out.outcome.created;
                report.warnings = out.outcome.warnings;
                report.summary = render_summary(&d, &out.structure);
                d = out.structure;
            }
            Err(e) => {
                timings.push(start.elapsed());
                report.error = Some(e.to_string());
            }
        }
        report.mismatches = check(&d, t.expected.as_ref());
        world_counts.push(d.model.world_count());
        states.push(d.clone());
        turns.push(report);
    }
    let counterfactuals = run_counterfactuals(s, &d);
    let report = ReplayReport { scenario: s.name.clone(), initial_mismatches, turns, world_counts, counterfactuals };
    Ok(Replay { report, states, timings })
}

/// Replays the scenario's own gold labels.
pub fn replay_gold(s: &Scenario) -> Result<Replay> {
    let mut interp = ScriptedInterpreter::new(s.gold_turns());
    replay(s, &mut interp, &InterpreterConfig::default())
}

pub fn run_counterfactuals(s: &Scenario, d: &DependencyStructure) -> Vec<CounterfactualResult> {
    s.counterfactuals.iter().map(|c| run_counterfactual(c, d)).collect()
}

fn names(set: &BTreeSet<ArgId>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(", ")
}

pub fn run_counterfactual(c: &Counterfactual, d: &DependencyStructure) -> CounterfactualResult {
    let mut result = CounterfactualResult {
        retract: c.retract.clone(),
        affected: BTreeSet::new(),
        decisions: vec![],
        reinstated: BTreeSet::new(),
        no_longer_accepted: BTreeSet::new(),
        rendering: String::new(),
        mismatches: vec![],
        warnings: vec![],
    };
    let report = match retract(&c.retract, &d.af, &d.dep, c.mode) {
        Ok(r) => r,
        Err(e) => {
            result.mismatches.push(format!("retraction failed: {e}"));
            return result;
        }
    };
    let resolve = |r: &String| d.resolve_ref(r).map(|a| a.id.clone());
    let resolve_all = |refs: &BTreeSet<String>, what: &str, mismatches: &mut Vec<String>| -> BTreeSet<ArgId> {
        refs.iter()
            .filter_map(|r| {
                let id = resolve(r);
                if id.is_none() {
                    mismatches.push(format!("{what}: `{r}` names no argument"));
                }
                id
            })
            .collect()
    };
    for (refs, expected) in [(&c.expect_affected, true), (&c.expect_unaffected, false)] {
        for r in refs {
            let argument = resolve(r);
            let affected = argument.as_ref().is_some_and(|a| report.affected.contains(a));
            result.decisions.push(Decision { reference: r.clone(), argument, expected_affected: expected, affected });
        }
    }
    let mut mismatches = vec![];
    if c.exact {
        let want = resolve_all(&c.expect_affected, "expect_affected", &mut mismatches);
        if want != report.affected {
            mismatches.push(format!("affected is {{{}}}, expected exactly {{{}}}", names(&report.affected), names(&want)));
        }
    }
    result.reinstated = report.reinstated().cloned().collect();
    result.no_longer_accepted = report.flagged().cloned().collect();
    for id in resolve_all(&c.expect_reinstated, "expect_reinstated", &mut mismatches) {
        if !result.reinstated.contains(&id) {
            mismatches.push(format!("{id} not reinstated"));
        }
    }
    for id in resolve_all(&c.expect_no_longer_accepted, "expect_no_longer_accepted", &mut mismatches) {
        if !result.no_longer_accepted.contains(&id) {
            mismatches.push(format!("{id} still accepted"));
        }
    }
    result.rendering = render_retraction(&report, d);
    for line in &c.expect_rendering {
        if !result.rendering.lines().any(|l| l == line) {
            mismatches.push(format!("rendering lacks `{line}`"));
        }
    }
    if !d.model.has_atom(&c.retract) {
        result.warnings.push(format!("`{}` is not a registered atom", c.retract));
    }
    result.warnings.extend(report.warnings.iter().cloned());
    result.affected = report.affected;
    result.mismatches = mismatches;
    result
}
