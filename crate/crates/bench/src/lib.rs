//! Benchmark harnesses: affected-query latency on synthetic states and
//! grounding accuracy under structural noise. Both write CSV.

pub mod latency;
pub mod noise;
pub mod synthetic;

pub use latency::{
    bench_affected, bench_replay_baseline, linear_fit, run_latency_suite, summarize, write_latency_csv, LatencyConfig,
    LatencyRow, LatencyStats, Method, ScalingSummary, DEFAULT_K_GRID,
};
pub use noise::{
    default_grid, inversions, median_curve, perturb, run_noise_suite, write_noise_csv, NoiseModel, NoiseReport,
    NoiseRow, NoiseSpec,
};
pub use synthetic::{gen_synthetic_state, Regime, SyntheticState, SyntheticStateSpec, TurnRecord};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Epistemic(#[from] epistemic_core::EpistemicError),
    #[error(transparent)]
    Argumentation(#[from] argumentation::ArgError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

pub(crate) fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}
