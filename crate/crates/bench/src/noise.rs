//! Structural noise and its effect on grounding accuracy.
//!
//! All draws use common random numbers: each perturbable item gets its own
//! uniform from `(seed, item)`, and is perturbed iff that uniform is below
//! ε. Raising ε therefore only adds perturbations for a fixed seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::ops::Range;

use argumentation::ArgStatus;
use engine::{DecisionStage, DependencyStructure, VerifyOptions};
use epistemic_core::AtomKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scenarios::grounding::{evaluate, Category, GroundingItem};
use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    EdgeDrop,
    EdgeAdd,
    StatusCorrupt,
}

impl NoiseModel {
    pub const ALL: [NoiseModel; 3] = [NoiseModel::EdgeDrop, NoiseModel::EdgeAdd, NoiseModel::StatusCorrupt];

    pub fn name(self) -> &'static str {
        match self {
            NoiseModel::EdgeDrop => "edge_drop",
            NoiseModel::EdgeAdd => "edge_add",
            NoiseModel::StatusCorrupt => "status_corrupt",
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub model: NoiseModel,
    pub epsilon: f64,
    pub seed: u64,
}

/// ε ∈ {0, 0.1, …, 0.8}.
pub fn default_grid() -> Vec<f64> {
    (0..=8).map(|i| i as f64 / 10.0).collect()
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The item's private generator: same `(seed, key)`, same draws.
fn item_rng(seed: u64, key: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(key.as_bytes()));
    rng
}

fn is_hypothesis_arg(d: &DependencyStructure, claim: &epistemic_core::Formula) -> bool {
    claim.as_atom().and_then(|a| d.model.atom(a)).is_some_and(|a| a.kind == AtomKind::Hypothesis)
}

/// Returns a perturbed copy; the input is untouched.
///
/// * `edge_drop` removes each dep entry with probability ε.
/// * `edge_add` considers every absent (hypothesis argument, observable or
///   hypothesis atom) pair and adds it with probability
///   `ε·|entries| / |candidates|`, so expected additions match the drops.
/// * `status_corrupt` moves each hypothesis argument, with probability ε,
///   to a uniformly chosen different status.
pub fn perturb(d: &DependencyStructure, spec: &NoiseSpec) -> Result<DependencyStructure> {
    let eps = spec.epsilon;
    if !(0.0..=1.0).contains(&eps) {
        return Err(BenchError::Invalid(format!("epsilon {eps} not in [0, 1]")));
    }
    let mut out = d.clone();
    if eps == 0.0 {
        return Ok(out);
    }
    match spec.model {
        NoiseModel::EdgeDrop => {
            for (arg, entries) in out.dep.deps.iter_mut() {
                entries.retain(|e| item_rng(spec.seed, &format!("drop {arg} {e}")).gen::<f64>() >= eps);
            }
        }
        NoiseModel::EdgeAdd => {
            let atoms: Vec<&str> = d
                .registry()
                .iter()
                .filter(|a| matches!(a.kind, AtomKind::Observable | AtomKind::Hypothesis))
                .map(|a| a.id.as_str())
                .collect();
            let mut candidates = vec![];
            for arg in d.af.args().iter().filter(|a| is_hypothesis_arg(d, &a.claim)) {
                for &p in &atoms {
                    if !d.dep.depends_on(&arg.id, p) {
                        candidates.push((arg.id.clone(), p.to_string()));
                    }
                }
            }
            if !candidates.is_empty() {
                let rate = (eps * d.dep.total_entries() as f64 / candidates.len() as f64).min(1.0);
                for (arg, p) in candidates {
                    if item_rng(spec.seed, &format!("add {arg} {p}")).gen::<f64>() < rate {
                        out.dep.extend(&arg, [p]);
                    }
                }
            }
        }
        NoiseModel::StatusCorrupt => {
            for arg in d.af.args().iter().filter(|a| is_hypothesis_arg(d, &a.claim)) {
                let mut rng = item_rng(spec.seed, &format!("status {}", arg.id));
                if rng.gen::<f64>() < eps {
                    let others: Vec<ArgStatus> = ArgStatus::ALL.into_iter().filter(|s| *s != arg.status).collect();
                    out.af.force_status(&arg.id, others[rng.gen_range(0..others.len())])?;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub model: NoiseModel,
    pub epsilon: f64,
    pub seed: u64,
    pub category: Category,
    pub accuracy: f64,
}

/// An item that decided before walking deps on the clean state but changed
/// verdict under noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreWalkFlip {
    pub model: NoiseModel,
    pub epsilon: f64,
    pub seed: u64,
    pub item: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub rows: Vec<NoiseRow>,
    /// Items whose clean verdict was settled before the dep walk.
    pub pre_walk_items: BTreeSet<String>,
    pub pre_walk_flips: Vec<PreWalkFlip>,
}

/// One row per (model, ε, seed, category). Each distinct queried state is
/// perturbed once per cell.
pub fn run_noise_suite<'a>(
    items: &[GroundingItem],
    state_at: impl Fn(u32) -> &'a DependencyStructure,
    models: &[NoiseModel],
    grid: &[f64],
    seeds: Range<u64>,
) -> Result<NoiseReport> {
    let opts = VerifyOptions::default();
    let clean = evaluate(items, &state_at, opts);
    let pre_walk: BTreeMap<&str, _> = clean
        .iter()
        .filter(|o| o.decided_at != DecisionStage::Walk)
        .map(|o| (o.id.as_str(), o.verdict))
        .collect();
    let turns: BTreeSet<u32> = items.iter().map(|i| i.turn).collect();
    let mut report = NoiseReport {
        rows: vec![],
        pre_walk_items: pre_walk.keys().map(|s| s.to_string()).collect(),
        pre_walk_flips: vec![],
    };
    for &model in models {
        for &epsilon in grid {
            for seed in seeds.clone() {
                let spec = NoiseSpec { model, epsilon, seed };
                let noisy: BTreeMap<u32, DependencyStructure> =
                    turns.iter().map(|&t| Ok((t, perturb(state_at(t), &spec)?))).collect::<Result<_>>()?;
                let outcomes = evaluate(items, |t| &noisy[&t], opts);
                for o in &outcomes {
                    if pre_walk.get(o.id.as_str()).is_some_and(|v| *v != o.verdict) {
                        report.pre_walk_flips.push(PreWalkFlip { model, epsilon, seed, item: o.id.clone() });
                    }
                }
                let acc = scenarios::grounding::accuracy_by_category(&outcomes);
                for category in Category::ALL {
                    if let Some(&accuracy) = acc.get(&category) {
                        report.rows.push(NoiseRow { model, epsilon, seed, category, accuracy });
                    }
                }
            }
        }
    }
    Ok(report)
}

pub fn write_noise_csv<W: io::Write>(rows: &[NoiseRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Seed-median accuracy at each ε of the grid, in grid order.
pub fn median_curve(rows: &[NoiseRow], model: NoiseModel, category: Category, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .filter_map(|&e| {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| r.model == model && r.category == category && r.epsilon == e)
                .map(|r| r.accuracy)
                .collect();
            crate::median(&v)
        })
        .collect()
}

/// Number of strict increases along a curve.
pub fn inversions(curve: &[f64]) -> usize {
    curve.windows(2).filter(|w| w[1] > w[0] + 1e-12).count()
}
