use std::collections::BTreeSet;

use argumentation::*;
use epistemic_core::{Atom, AtomKind, Formula};

fn arg(id: &str, claim: &str, turn: u32) -> Argument {
    Argument::new(id, Formula::atom(claim), "a", turn, ArgType::Pro)
}

fn framework(ids: &[&str], attacks: &[(&str, &str)]) -> ArgFramework {
    let mut af = ArgFramework::new();
    for id in ids {
        af.add_argument(arg(id, id, 1)).unwrap();
    }
    for (a, t) in attacks {
        af.add_attack(a, t).unwrap();
    }
    af
}

fn set(ids: &[&str]) -> BTreeSet<ArgId> {
    ids.iter().map(|s| s.to_string()).collect()
}

#[test]
fn add_to_empty() {
    let af = framework(&["x1"], &[]);
    assert_eq!(af.len(), 1);
    assert!(af.attacks().is_empty());
}

#[test]
fn two_cycle_is_refused() {
    let mut af = framework(&["x1", "x2"], &[("x2", "x1")]);
    assert_eq!(
        af.add_attack("x1", "x2"),
        Err(ArgError::CycleIntroduced { attacker: "x1".into(), target: "x2".into() })
    );
    assert_eq!(af.add_attack("x1", "x1"), Err(ArgError::CycleIntroduced { attacker: "x1".into(), target: "x1".into() }));
    assert!(af.is_acyclic());
}

#[test]
fn duplicate_and_non_monotone_ids() {
    let mut af = framework(&["x1"], &[]);
    assert_eq!(af.add_argument(arg("x1", "q", 2)), Err(ArgError::DuplicateId("x1".into())));
    assert!(matches!(af.add_argument(arg("x0", "q", 0)), Err(ArgError::NonMonotoneTurn { .. })));
}

#[test]
fn empty_and_singleton_extensions() {
    let empty = ArgFramework::new();
    assert!(preferred_extension(&empty).unwrap().is_empty());
    assert_eq!(brute_force_extensions(&empty).unwrap(), BTreeSet::from([BTreeSet::new()]));
    assert_eq!(preferred_extension(&framework(&["x"], &[])).unwrap(), set(&["x"]));
}

#[test]
fn chain_of_three() {
    let af = framework(&["x1", "x2", "x3"], &[("x1", "x2"), ("x2", "x3")]);
    assert_eq!(preferred_extension(&af).unwrap(), set(&["x1", "x3"]));
    // Hand enumeration of the 8 subsets: the admissible ones are ∅, {x1},
    // {x1,x3}; only the last is maximal.
    assert_eq!(brute_force_extensions(&af).unwrap(), BTreeSet::from([set(&["x1", "x3"])]));
}

#[test]
fn mutual_attack_has_two_extensions() {
    let mut af = framework(&["x1", "x2"], &[]);
    af.add_attack_unchecked("x1", "x2").unwrap();
    af.add_attack_unchecked("x2", "x1").unwrap();
    assert_eq!(preferred_extension(&af), Err(ArgError::CyclicFramework));
    assert_eq!(brute_force_extensions(&af).unwrap(), BTreeSet::from([set(&["x1"]), set(&["x2"])]));
}

#[test]
fn brute_force_refuses_large_frameworks() {
    let ids: Vec<String> = (0..16).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    assert_eq!(brute_force_extensions(&framework(&refs, &[])), Err(ArgError::TooLarge(16)));
}

#[test]
fn status_machine() {
    let mut af = framework(&["x"], &[]);
    af.set_status("x", ArgStatus::Weakened).unwrap();
    assert!(af.set_status("x", ArgStatus::Resolved).is_err());
    af.set_status("x", ArgStatus::Abandoned).unwrap();
    assert_eq!(
        af.set_status("x", ArgStatus::Active),
        Err(ArgError::InvalidTransition { id: "x".into(), from: ArgStatus::Abandoned, to: ArgStatus::Active })
    );
    let mut af = framework(&["y"], &[]);
    af.set_status("y", ArgStatus::Resolved).unwrap();
    assert!(af.set_status("y", ArgStatus::Abandoned).is_err());
}

#[test]
fn affected_is_direct() {
    let af = framework(&["x1", "x2"], &[]);
    let mut dep = DepMap::new();
    dep.extend("x1", ["p"]);
    dep.extend("x2", ["x1"]);
    let ext = preferred_extension(&af).unwrap();
    assert_eq!(affected("p", &ext, &dep), set(&["x1"]));
    assert!(affected("nothing", &ext, &dep).is_empty());
}

#[test]
fn retract_without_dependents_changes_nothing() {
    let af = framework(&["x1", "x2"], &[("x1", "x2")]);
    let report = retract("p", &af, &DepMap::new(), RetractMode::Direct).unwrap();
    assert!(report.affected.is_empty());
    assert_eq!(report.recomputed_extension, report.surviving_extension);
    assert!(report.changes.is_empty());
    assert_eq!(report.warnings.len(), 1);
}

#[test]
fn retract_reinstates_and_wakes_dormant() {
    // d depends on p and attacks t; w waits for p's retraction and attacks t too.
    let af = framework(&["d", "t", "w"], &[("d", "t"), ("w", "d")]);
    let mut dep = DepMap::new();
    dep.extend("d", ["p"]);
    dep.extend("w", ["!p"]);
    assert_eq!(dep.dormant(), set(&["w"]));
    assert_eq!(current_extension(&af, &dep).unwrap(), set(&["d"]));
    let report = retract("p", &af, &dep, RetractMode::Direct).unwrap();
    assert_eq!(report.affected, set(&["d"]));
    assert_eq!(report.recomputed_extension, set(&["t", "w"]));
    assert_eq!(report.reinstated().cloned().collect::<BTreeSet<_>>(), set(&["t", "w"]));
}

#[test]
fn cascade_follows_claims() {
    let mut af = ArgFramework::new();
    af.add_argument(arg("h", "h", 1)).unwrap();
    af.add_argument(arg("k", "k", 2)).unwrap();
    let mut dep = DepMap::new();
    dep.extend("h", ["p"]);
    dep.extend("k", ["h"]);
    let direct = retract("p", &af, &dep, RetractMode::Direct).unwrap();
    assert_eq!(direct.affected, set(&["h"]));
    let cascade = retract("p", &af, &dep, RetractMode::Cascade).unwrap();
    assert_eq!(cascade.affected, set(&["h", "k"]));
}

#[test]
fn containment_fails_on_reinstated_attacker() {
    // a attacks c, c attacks b: S = {a, b}. Dropping a reinstates c, which
    // now defeats b even though b never depended on p.
    let af = framework(&["a", "b", "c"], &[("a", "c"), ("c", "b")]);
    let mut dep = DepMap::new();
    dep.extend("a", ["p"]);
    let report = retract("p", &af, &dep, RetractMode::Direct).unwrap();
    assert_eq!(report.surviving_extension, set(&["b"]));
    assert!(report.conflict_free);
    assert_eq!(report.dropped_from_surviving, set(&["b"]));
}

#[test]
fn walk_follows_hypotheses() {
    let registry = vec![
        Atom::new("o1", AtomKind::Observable),
        Atom::new("o2", AtomKind::Observable),
        Atom::new("h1", AtomKind::Hypothesis),
        Atom::new("h2", AtomKind::Hypothesis),
    ];
    let mut af = ArgFramework::new();
    af.add_argument(arg("A1", "h1", 1)).unwrap();
    af.add_argument(arg("A2", "h2", 2)).unwrap();
    let mut dep = DepMap::new();
    dep.extend("A1", ["o2", "h2"]);
    dep.extend("A2", ["o1", "h1", "!o2"]);
    assert_eq!(walk_deps("A1", &dep, &af, &registry), vec!["o1", "o2", "h2"]);
    assert!(walk_deps("A3", &dep, &af, &registry).is_empty());
}

#[test]
fn framework_json_round_trip() {
    let mut af = framework(&["x1", "x2"], &[("x1", "x2")]);
    af.set_status("x2", ArgStatus::Weakened).unwrap();
    let text = serde_json::to_string(&af).unwrap();
    assert_eq!(serde_json::from_str::<ArgFramework>(&text).unwrap(), af);
    let cyclic = r#"{"args":[],"attacks":[["x","x"]]}"#;
    assert!(serde_json::from_str::<ArgFramework>(cyclic).is_err());
}
