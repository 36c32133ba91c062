//! Synthetic engine states for the latency harness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use argumentation::{ArgType, Argument};
use engine::DependencyStructure;
use epistemic_core::{Atom, AtomKind, EpistemicModel, Formula};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Arguments accumulate: `|Args| ≈ arg_ratio·K`.
    Naive,
    /// The oldest argument is retired once `cap` is exceeded.
    Bounded,
}

impl Regime {
    pub const ALL: [Regime; 2] = [Regime::Naive, Regime::Bounded];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Naive => "naive",
            Regime::Bounded => "bounded",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStateSpec {
    pub k: u32,
    pub regime: Regime,
    pub cap: usize,
    pub arg_ratio: f64,
    /// Chance that a new argument attacks one earlier live argument.
    pub attack_prob: f64,
    pub seed: u64,
}

impl SyntheticStateSpec {
    pub fn new(k: u32, regime: Regime, seed: u64) -> Self {
        SyntheticStateSpec { k, regime, cap: 50, arg_ratio: 0.3, attack_prob: 0.4, seed }
    }
}

/// One transcript line, as the history-replay baseline sees it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn: u32,
    pub text: String,
    /// Argument introduced at this turn, if any.
    pub introduced: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SyntheticState {
    pub structure: DependencyStructure,
    pub transcript: Vec<TurnRecord>,
}

fn atom_id(t: u32, kind: AtomKind) -> String {
    match kind {
        AtomKind::Hypothesis => format!("h{t}"),
        _ => format!("o{t}"),
    }
}

/// Turn `t` introduces one atom (observable or hypothesis, fair coin).
/// Arguments appear at the turns where `⌈arg_ratio·t⌉` steps up, so `K=1`
/// has exactly one; each depends on 1–4 distinct earlier atoms (its own
/// when there are none) and may attack one earlier live argument, which
/// keeps the attack graph acyclic by construction. The model is a single
/// world: latency here is about the framework, not the worlds.
pub fn gen_synthetic_state(spec: &SyntheticStateSpec) -> Result<SyntheticState> {
    if spec.k == 0 {
        return Err(BenchError::Invalid("K must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&spec.arg_ratio) || spec.arg_ratio == 0.0 {
        return Err(BenchError::Invalid(format!("arg_ratio {} not in (0, 1]", spec.arg_ratio)));
    }
    if spec.regime == Regime::Bounded && spec.cap == 0 {
        return Err(BenchError::Invalid("cap must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let kinds: Vec<AtomKind> =
        (0..spec.k).map(|_| if rng.gen_bool(0.5) { AtomKind::Hypothesis } else { AtomKind::Observable }).collect();
    let ids: Vec<String> = (1..=spec.k).zip(&kinds).map(|(t, &k)| atom_id(t, k)).collect();
    let registry: Vec<Atom> = ids.iter().zip(&kinds).map(|(id, &k)| Atom::new(id, k)).collect();
    let agents = vec!["a".to_string(), "b".to_string()];
    let one = |v: u32| agents.iter().map(|a| (a.clone(), vec![v])).collect::<BTreeMap<_, _>>();
    let model = EpistemicModel::from_parts(
        registry,
        agents.clone(),
        vec![(0, vec![true; spec.k as usize])],
        one(0),
        one(0),
    )?;
    let mut d = DependencyStructure::new(model);
    d.turn = spec.k;

    let steps = |t: u32| (spec.arg_ratio * t as f64).ceil() as u64;
    let mut live: Vec<String> = vec![];
    let mut transcript = Vec::with_capacity(spec.k as usize);
    for t in 1..=spec.k {
        let i = (t - 1) as usize;
        let speaker = &agents[i % 2];
        let claim = &ids[i];
        if steps(t) == steps(t - 1) {
            transcript.push(TurnRecord { turn: t, text: format!("T{t} {speaker}: notes {claim}"), introduced: None });
            continue;
        }
        let degree = rng.gen_range(1..=4).min(i.max(1));
        let deps: Vec<String> = if i == 0 {
            vec![claim.clone()]
        } else {
            rand::seq::index::sample(&mut rng, i, degree).into_iter().map(|j| ids[j].clone()).collect()
        };
        let arg_type = if kinds[i] == AtomKind::Hypothesis { ArgType::Hypothesize } else { ArgType::Observe };
        let id = format!("{claim}@T{t}");
        d.af.add_argument(Argument::new(&id, Formula::atom(claim), speaker, t, arg_type))?;
        d.dep.extend(&id, deps.iter().cloned());
        if !live.is_empty() && rng.gen_bool(spec.attack_prob) {
            let target = live.choose(&mut rng).expect("non-empty");
            // Edges always point from newer to older arguments.
            d.af.add_attack_unchecked(&id, target)?;
        }
        live.push(id.clone());
        if spec.regime == Regime::Bounded && live.len() > spec.cap {
            let old = live.remove(0);
            d.af = d.af.without(&BTreeSet::from([old.clone()]));
            d.dep.remove(&old);
        }
        transcript.push(TurnRecord {
            turn: t,
            text: format!("T{t} {speaker}: {claim} because {}", deps.join(", ")),
            introduced: Some(id),
        });
    }
    Ok(SyntheticState { structure: d, transcript })
}
