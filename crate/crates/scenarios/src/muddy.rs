use std::collections::{BTreeMap, BTreeSet};

use engine::{Expectation, FormulaCheck, Op, ResolveMode};
use epistemic_core::{child_name, AtomKind, Formula};
use interpreter::WireOp;

use crate::error::{Result, ScenarioError};
use crate::scenario::{AgentSpec, AtomSpec, InitialSpec, Scenario, ScenarioTurn, SCENARIO_FORMAT};

pub const FATHER: &str = "father";

fn mud(child: &str) -> Formula {
    Formula::atom(format!("m_{child}"))
}

/// ¬(Kᵢ mᵢ ∨ Kᵢ ¬mᵢ)
pub fn dont_know(child: &str) -> Formula {
    let m = mud(child);
    Formula::not(Formula::or([Formula::knows(child, m.clone()), Formula::knows(child, Formula::not(m))]))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// World counts of the textbook schedule: all `2ⁿ` worlds, the father's
/// announcement, `k−1` "nobody knows" rounds (round `r` leaves the worlds
/// with more than `r` muddy children), then the round in which everybody
/// announces what they know, which leaves only the actual world.
pub fn muddy_schedule(n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![1 << n];
    for r in 0..k {
        out.push((r + 1..=n).map(|j| binomial(n, j)).sum());
    }
    out.push(1);
    out
}

/// Muddy children over `n` children named `a`, `b`, … with `muddy` dirty,
/// plus a father who sees everyone. Every child sees every forehead but
/// their own.
pub fn gen_muddy(n: usize, muddy: &BTreeSet<String>) -> Result<Scenario> {
    if n == 0 || n > 10 || muddy.is_empty() || muddy.len() > n {
        return Err(ScenarioError::InvalidCounts { n, muddy: muddy.len() });
    }
    let children: Vec<String> = (0..n).map(child_name).collect();
    if let Some(bad) = muddy.iter().find(|m| !children.contains(m)) {
        return Err(ScenarioError::invalid("muddy", format!("`{bad}` is not one of the {n} children")));
    }
    let k = muddy.len();
    let atoms: Vec<String> = children.iter().map(|c| format!("m_{c}")).collect();
    let mut masks: BTreeMap<String, BTreeSet<String>> = children
        .iter()
        .map(|c| (c.clone(), atoms.iter().filter(|a| **a != format!("m_{c}")).cloned().collect()))
        .collect();
    masks.insert(FATHER.into(), atoms.iter().cloned().collect());

    let mut agents: Vec<AgentSpec> = children
        .iter()
        .map(|c| AgentSpec { id: c.clone(), name: String::new(), role: "child".into(), authority: false })
        .collect();
    agents.push(AgentSpec { id: FATHER.into(), name: String::new(), role: "announcer".into(), authority: false });

    let schedule = muddy_schedule(n, k);
    let counts = |i: usize| Some(Expectation { world_count: Some(schedule[i]), ..Expectation::default() });
    let op = |speaker: &str, op: Op| WireOp { speaker: Some(speaker.to_string()), op };

    let mut turns = vec![ScenarioTurn {
        id: 1,
        speaker: FATHER.into(),
        text: "At least one of you has mud on your forehead.".into(),
        simultaneous: false,
        surprise: vec![],
        gold_ops: vec![op(FATHER, Op::Observe { psi: Formula::or(atoms.iter().map(Formula::atom)), argument: None })],
        expected: counts(1),
    }];
    for r in 1..k {
        turns.push(ScenarioTurn {
            id: turns.len() as u32 + 1,
            speaker: FATHER.into(),
            text: format!("Round {r}: nobody steps forward."),
            simultaneous: true,
            surprise: vec![],
            gold_ops: children.iter().map(|c| op(c, Op::Observe { psi: dont_know(c), argument: None })).collect(),
            expected: counts(r + 1),
        });
    }
    let knows: Vec<(String, Formula)> = children
        .iter()
        .map(|c| {
            let m = if muddy.contains(c) { mud(c) } else { Formula::not(mud(c)) };
            (c.clone(), Formula::knows(c, m))
        })
        .collect();
    // Muddy children speak first; the clean ones can only tell afterwards.
    let order = knows.iter().filter(|(c, _)| muddy.contains(c)).chain(knows.iter().filter(|(c, _)| !muddy.contains(c)));
    let resolve = order
        .map(|(c, f)| {
            op(
                c,
                Op::Resolve {
                    gamma: f.clone(),
                    subsumes: vec![],
                    mode: ResolveMode::Consensual,
                    dissenters: vec![],
                    argument: None,
                },
            )
        })
        .collect();
    let mut last = counts(k + 1).expect("set");
    last.formulas = knows.iter().map(|(_, f)| FormulaCheck { formula: f.clone(), holds: true }).collect();
    turns.push(ScenarioTurn {
        id: turns.len() as u32 + 1,
        speaker: muddy.iter().next().expect("non-empty").clone(),
        text: "Everyone now knows their own state.".into(),
        simultaneous: false,
        surprise: vec![],
        gold_ops: resolve,
        expected: Some(last),
    });

    let actual = children.iter().map(|c| (format!("m_{c}"), muddy.contains(c))).collect();
    let s = Scenario {
        format: SCENARIO_FORMAT,
        name: format!("muddy-{n}-{}", muddy.iter().cloned().collect::<Vec<_>>().join("")),
        description: format!("{n} children, {k} muddy"),
        agents,
        initial: InitialSpec {
            atoms: atoms.iter().map(|a| AtomSpec { id: a.clone(), kind: AtomKind::Observable, label: String::new() }).collect(),
            masks: Some(masks),
            actual: Some(actual),
            arguments: vec![],
            expected: counts(0),
        },
        turns,
        counterfactuals: vec![],
    };
    s.validate()?;
    Ok(s)
}
