//! Update laws over randomized models (≤6 atoms, ≤4 agents).

use std::collections::{BTreeMap, BTreeSet};

use epistemic_core::*;
use proptest::prelude::*;

const AGENTS: [&str; 4] = ["a", "b", "c", "d"];

#[derive(Debug, Clone)]
struct Spec {
    atoms: usize,
    agents: usize,
    worlds: Vec<u32>,
    ranks: Vec<Vec<u32>>,
    cells: Vec<Vec<u32>>,
}

fn spec() -> impl Strategy<Value = Spec> {
    (1usize..=6, 1usize..=4).prop_flat_map(|(atoms, agents)| {
        let full = 1u32 << atoms;
        proptest::sample::subsequence((0..full).collect::<Vec<_>>(), 1..=full.min(24) as usize).prop_flat_map(
            move |worlds| {
                let n = worlds.len();
                (
                    Just(worlds),
                    proptest::collection::vec(proptest::collection::vec(0u32..4, n), agents),
                    proptest::collection::vec(proptest::collection::vec(0u32..3, n), agents),
                )
                    .prop_map(move |(worlds, ranks, cells)| Spec { atoms, agents, worlds, ranks, cells })
            },
        )
    })
}

fn build(s: &Spec) -> EpistemicModel {
    let registry = (0..s.atoms).map(|k| Atom::new(format!("p{k}"), AtomKind::Observable)).collect();
    let agents: Vec<String> = AGENTS[..s.agents].iter().map(|a| a.to_string()).collect();
    let worlds = s.worlds.iter().map(|&id| (id, (0..s.atoms).map(|k| id >> k & 1 == 1).collect())).collect();
    let ranks = agents.iter().cloned().zip(s.ranks.iter().cloned()).collect();
    let cells = agents.iter().cloned().zip(s.cells.iter().cloned()).collect();
    EpistemicModel::from_parts(registry, agents, worlds, ranks, cells).unwrap()
}

/// Formula over atoms `p0..p{atoms}` and the first `agents` agents.
fn formula(atoms: usize, agents: usize, modal: bool) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => (0..atoms).prop_map(|k| Formula::atom(format!("p{k}"))),
        1 => Just(Formula::Top),
    ];
    leaf.prop_recursive(3, 16, 3, move |inner| {
        let agent = (0..agents).prop_map(|i| AGENTS[i].to_string());
        let mut arms: Vec<BoxedStrategy<Formula>> = vec![
            inner.clone().prop_map(Formula::not).boxed(),
            proptest::collection::vec(inner.clone(), 2..3).prop_map(Formula::And).boxed(),
            proptest::collection::vec(inner.clone(), 2..3).prop_map(Formula::Or).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)).boxed(),
        ];
        if modal {
            arms.push((agent.clone(), inner.clone()).prop_map(|(i, f)| Formula::knows(i, f)).boxed());
            arms.push((agent, inner.clone()).prop_map(|(i, f)| Formula::believes(i, f)).boxed());
        }
        proptest::strategy::Union::new(arms)
    })
}

fn model_and(modal: bool) -> impl Strategy<Value = (Spec, Formula)> {
    spec().prop_flat_map(move |s| {
        let f = formula(s.atoms, s.agents, modal);
        (Just(s), f)
    })
}

/// Pairwise re-implementation of K and B at a world.
fn brute_knows(m: &EpistemicModel, agent: &str, w: WorldId, phi: &Formula) -> bool {
    let c = m.cell(agent, w).unwrap();
    m.world_ids().filter(|&v| m.cell(agent, v).unwrap() == c).all(|v| m.eval(v, phi).unwrap())
}

fn brute_believes(m: &EpistemicModel, agent: &str, w: WorldId, phi: &Formula) -> bool {
    let c = m.cell(agent, w).unwrap();
    let same: Vec<WorldId> = m.world_ids().filter(|&v| m.cell(agent, v).unwrap() == c).collect();
    same.iter()
        .filter(|&&v| same.iter().all(|&u| m.rank(agent, v).unwrap() <= m.rank(agent, u).unwrap()))
        .all(|&v| m.eval(v, phi).unwrap())
}

fn pairs_in_cell(m: &EpistemicModel, agent: &str) -> Vec<(WorldId, WorldId)> {
    let ids: Vec<WorldId> = m.world_ids().collect();
    let mut out = vec![];
    for &u in &ids {
        for &v in &ids {
            if u != v && m.cell(agent, u).unwrap() == m.cell(agent, v).unwrap() {
                out.push((u, v));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn announcement_success((s, psi) in model_and(false)) {
        let m = build(&s);
        let out = m.announce(&psi).unwrap();
        prop_assert!(out.check_invariants().is_ok());
        if !out.is_inconsistent() {
            let agents: Vec<&str> = AGENTS[..s.agents].to_vec();
            let ck = Formula::common(agents, psi.clone());
            for w in out.world_ids() {
                prop_assert!(out.eval(w, &ck).unwrap());
            }
        }
    }

    #[test]
    fn lexicographic_strict_separation((s, psi) in model_and(true)) {
        let m = build(&s);
        let up = m.upgrade_lexicographic(&psi).unwrap();
        prop_assert!(up.check_invariants().is_ok());
        prop_assert_eq!(up.world_ids().collect::<Vec<_>>(), m.world_ids().collect::<Vec<_>>());
        for agent in m.agents() {
            for (u, v) in pairs_in_cell(&m, agent) {
                let (pu, pv) = (m.eval(u, &psi).unwrap(), m.eval(v, &psi).unwrap());
                let (ru, rv) = (up.rank(agent, u).unwrap(), up.rank(agent, v).unwrap());
                if pu && !pv {
                    prop_assert!(ru < rv);
                } else if pu == pv {
                    prop_assert_eq!(ru.cmp(&rv), m.rank(agent, u).unwrap().cmp(&m.rank(agent, v).unwrap()));
                }
            }
        }
    }

    #[test]
    fn conservative_preserves_unpromoted((s, psi) in model_and(true)) {
        let m = build(&s);
        let up = m.upgrade_conservative(&psi).unwrap();
        prop_assert!(up.check_invariants().is_ok());
        for agent in m.agents() {
            // Promoted: minimal-rank ψ-worlds of their cell.
            let promoted: BTreeSet<WorldId> = m.world_ids().filter(|&w| {
                m.eval(w, &psi).unwrap() && pairs_in_cell(&m, agent).iter().filter(|(u, _)| *u == w).all(|&(_, v)| {
                    !m.eval(v, &psi).unwrap() || m.rank(agent, w).unwrap() <= m.rank(agent, v).unwrap()
                })
            }).collect();
            for (u, v) in pairs_in_cell(&m, agent) {
                let (ru, rv) = (up.rank(agent, u).unwrap(), up.rank(agent, v).unwrap());
                match (promoted.contains(&u), promoted.contains(&v)) {
                    (false, false) => prop_assert_eq!(ru.cmp(&rv), m.rank(agent, u).unwrap().cmp(&m.rank(agent, v).unwrap())),
                    (true, false) => prop_assert!(ru < rv),
                    (true, true) => prop_assert_eq!(ru, rv),
                    (false, true) => prop_assert!(ru > rv),
                }
            }
        }
    }

    #[test]
    fn expansion_doubles_and_is_conservative((s, phi) in model_and(true)) {
        let m = build(&s);
        let agents: Vec<String> = m.agents().to_vec();
        let out = m.expand_awareness(&agents, Atom::new("fresh", AtomKind::Hypothesis)).unwrap();
        prop_assert!(out.check_invariants().is_ok());
        prop_assert_eq!(out.world_count(), 2 * m.world_count());
        let before = m.truth(&phi).unwrap();
        let after = out.truth(&phi).unwrap();
        let n = m.world_count();
        for i in 0..n {
            prop_assert_eq!(after[i], before[i]);
            prop_assert_eq!(after[n + i], before[i]);
        }
    }

    #[test]
    fn knows_and_believes_match_brute_force((s, phi) in model_and(true), agent in 0usize..4) {
        let m = build(&s);
        let agent = AGENTS[agent % s.agents];
        let k = Formula::knows(agent, phi.clone());
        let b = Formula::believes(agent, phi.clone());
        for w in m.world_ids() {
            prop_assert_eq!(m.eval(w, &k).unwrap(), brute_knows(&m, agent, w, &phi));
            prop_assert_eq!(m.eval(w, &b).unwrap(), brute_believes(&m, agent, w, &phi));
        }
    }
}

#[test]
fn common_knowledge_uses_transitive_closure() {
    // a links {0,1}, b links {1,2}: C_{a,b} spans all three worlds.
    let m = EpistemicModel::from_parts(
        vec![Atom::new("p", AtomKind::Observable), Atom::new("q", AtomKind::Observable)],
        vec!["a".into(), "b".into()],
        vec![(0, vec![true, true]), (1, vec![true, false]), (2, vec![false, false])],
        BTreeMap::from([("a".to_string(), vec![0, 0, 0]), ("b".to_string(), vec![0, 0, 0])]),
        BTreeMap::from([("a".to_string(), vec![0, 0, 1]), ("b".to_string(), vec![0, 1, 1])]),
    )
    .unwrap();
    let p = Formula::atom("p");
    assert!(m.eval(0, &Formula::knows("a", p.clone())).unwrap());
    assert!(!m.eval(0, &Formula::common(["a", "b"], p.clone())).unwrap());
    assert!(m.eval(0, &Formula::common(["a"], p)).unwrap());
}
