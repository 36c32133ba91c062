//! Affected-query latency: indexed verifier vs. history replay.

use std::collections::BTreeSet;
use std::fmt;
use std::hint::black_box;
use std::io;
use std::time::Instant;

use engine::DependencyStructure;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::synthetic::{gen_synthetic_state, Regime, SyntheticState, SyntheticStateSpec, TurnRecord};
use crate::{BenchError, Result};

pub const DEFAULT_K_GRID: [u32; 7] = [13, 50, 100, 200, 500, 1000, 2000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub median_ns: u64,
    pub p95_ns: u64,
}

impl LatencyStats {
    fn from_samples(mut ns: Vec<u64>) -> Self {
        ns.sort_unstable();
        let at = |q: f64| ns[((ns.len() - 1) as f64 * q).round() as usize];
        LatencyStats { median_ns: at(0.5), p95_ns: at(0.95) }
    }
}

fn query_atoms(d: &DependencyStructure, queries: usize, seed: u64) -> Result<Vec<String>> {
    if queries == 0 {
        return Err(BenchError::Invalid("queries must be at least 1".into()));
    }
    let ids: Vec<&String> = d.registry().iter().map(|a| &a.id).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..queries).map(|_| ids.choose(&mut rng).map_or_else(String::new, |s| s.to_string())).collect())
}

fn time_each(atoms: &[String], mut f: impl FnMut(&str) -> usize) -> LatencyStats {
    let samples = atoms
        .iter()
        .map(|p| {
            let start = Instant::now();
            black_box(f(black_box(p)));
            start.elapsed().as_nanos() as u64
        })
        .collect();
    LatencyStats::from_samples(samples)
}

/// Wall time of the engine's `Affected(p)` over random registry atoms.
pub fn bench_affected(d: &DependencyStructure, queries: usize, seed: u64) -> Result<LatencyStats> {
    let atoms = query_atoms(d, queries, seed)?;
    Ok(time_each(&atoms, |p| engine::affected(p, d).map(|(a, _)| a.len()).unwrap_or(0)))
}

/// The baseline's answer: every still-present argument whose creating turn
/// mentions `p` among its reasons, found by scanning the whole transcript.
pub fn replay_affected(p: &str, transcript: &[TurnRecord], d: &DependencyStructure) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for r in transcript {
        let Some(reasons) = r.text.split_once(" because ").map(|(_, rest)| rest) else { continue };
        if reasons.split(", ").any(|m| m == p) {
            if let Some(id) = r.introduced.as_ref().filter(|id| d.af.contains(id)) {
                out.insert(id.clone());
            }
        }
    }
    out
}

/// Wall time of [`replay_affected`] over the same query distribution.
pub fn bench_replay_baseline(s: &SyntheticState, queries: usize, seed: u64) -> Result<LatencyStats> {
    let atoms = query_atoms(&s.structure, queries, seed)?;
    Ok(time_each(&atoms, |p| replay_affected(p, &s.transcript, &s.structure).len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Verifier,
    Baseline,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Verifier => "verifier",
            Method::Baseline => "baseline",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyRow {
    #[serde(rename = "K")]
    pub k: u32,
    pub regime: Regime,
    pub method: Method,
    pub seed: u64,
    pub median_ns: u64,
    pub p95_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyConfig {
    pub grid: Vec<u32>,
    pub regimes: Vec<Regime>,
    pub first_seed: u64,
    pub seeds: u64,
    pub queries: usize,
    pub cap: usize,
    pub arg_ratio: f64,
}

impl Default for LatencyConfig {
    fn default() -> Self {
        LatencyConfig {
            grid: DEFAULT_K_GRID.to_vec(),
            regimes: Regime::ALL.to_vec(),
            first_seed: 0,
            seeds: 5,
            queries: 200,
            cap: 50,
            arg_ratio: 0.3,
        }
    }
}

/// Runs every cell on the calling thread, one after another.
pub fn run_latency_suite(cfg: &LatencyConfig) -> Result<Vec<LatencyRow>> {
    let mut rows = vec![];
    for &k in &cfg.grid {
        for &regime in &cfg.regimes {
            for seed in cfg.first_seed..cfg.first_seed + cfg.seeds {
                let spec = SyntheticStateSpec { cap: cfg.cap, arg_ratio: cfg.arg_ratio, ..SyntheticStateSpec::new(k, regime, seed) };
                let s = gen_synthetic_state(&spec)?;
                let qseed = seed.wrapping_mul(0x9e37_79b9).wrapping_add(k as u64);
                for (method, stats) in [
                    (Method::Verifier, bench_affected(&s.structure, cfg.queries, qseed)?),
                    (Method::Baseline, bench_replay_baseline(&s, cfg.queries, qseed)?),
                ] {
                    rows.push(LatencyRow { k, regime, method, seed, median_ns: stats.median_ns, p95_ns: stats.p95_ns });
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_latency_csv<W: io::Write>(rows: &[LatencyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Median over seeds of the per-seed medians of one cell.
pub fn cell_median(rows: &[LatencyRow], k: u32, regime: Regime, method: Method) -> Option<f64> {
    let v: Vec<f64> = rows
        .iter()
        .filter(|r| r.k == k && r.regime == regime && r.method == method)
        .map(|r| r.median_ns as f64)
        .collect();
    crate::median(&v)
}

/// Least-squares line `y = a + b·x`, returned as `(b, a, R²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (b, my - b * mx, r2)
}

/// The three scaling properties read off a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    /// Bounded-regime verifier median at the largest K over the one at 200.
    pub plateau_ratio: f64,
    pub baseline_slope: f64,
    pub baseline_r2: f64,
    /// Baseline over verifier median at the largest K, bounded regime.
    pub gap_at_max: f64,
}

pub fn summarize(rows: &[LatencyRow], grid: &[u32]) -> Option<ScalingSummary> {
    let max = *grid.iter().max()?;
    let cell = |k, m| cell_median(rows, k, Regime::Bounded, m);
    let xs: Vec<f64> = grid.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = grid.iter().map(|&k| cell(k, Method::Baseline)).collect::<Option<_>>()?;
    let (slope, _, r2) = linear_fit(&xs, &ys);
    Some(ScalingSummary {
        plateau_ratio: cell(max, Method::Verifier)? / cell(200, Method::Verifier)?,
        baseline_slope: slope,
        baseline_r2: r2,
        gap_at_max: cell(max, Method::Baseline)? / cell(max, Method::Verifier)?,
    })
}
