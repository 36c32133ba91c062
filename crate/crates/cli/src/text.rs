//! Plain-text renderings. JSON output serializes the same values.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::Path;

use argumentation::RetractionReport;
use bench::{LatencyRow, Method, NoiseModel, NoiseReport, Regime, ScalingSummary};
use engine::{DependencyStructure, VerifyResult};
use scenarios::grounding::Category;
use scenarios::ReplayReport;

fn list<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    items.into_iter().map(String::as_str).collect::<Vec<_>>().join(", ")
}

pub fn replay(r: &ReplayReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}: {} turns", r.scenario, r.turns.len());
    for m in &r.initial_mismatches {
        let _ = writeln!(out, "  initial: {} expected {} got {}", m.field, m.expected, m.actual);
    }
    for t in &r.turns {
        let state = if t.applied { "ok" } else { "FAILED" };
        let _ = write!(out, "T{} {} {state}", t.id, t.speaker);
        if t.attempts > 1 {
            let _ = write!(out, " after {} attempts", t.attempts);
        }
        if !t.created.is_empty() {
            let _ = write!(out, "; created {}", list(&t.created));
        }
        out.push('\n');
        if let Some(e) = &t.error {
            let _ = writeln!(out, "  error: {e}");
        }
        for w in &t.warnings {
            let _ = writeln!(out, "  warning: {w}");
        }
        for m in &t.mismatches {
            let _ = writeln!(out, "  mismatch {}: expected {}, got {}", m.field, m.expected, m.actual);
        }
    }
    let counts: Vec<String> = r.world_counts.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "world counts: {}", counts.join(" "));
    for c in &r.counterfactuals {
        let _ = writeln!(
            out,
            "retract {}: affected {{{}}}; {}/{} decisions correct",
            c.retract,
            list(&c.affected),
            c.correct_decisions(),
            c.decisions.len()
        );
        for line in c.rendering.lines() {
            let _ = writeln!(out, "  {line}");
        }
        for m in &c.mismatches {
            let _ = writeln!(out, "  mismatch: {m}");
        }
    }
    if !r.counterfactuals.is_empty() {
        let (ok, n) = r.decision_score();
        let _ = writeln!(out, "decisions: {ok}/{n}");
    }
    let _ = writeln!(out, "mismatches: {}", r.mismatch_count());
    let _ = writeln!(out, "result: {}", if r.passed() { "PASS" } else { "FAIL" });
    out
}

pub fn verify(claim: &str, r: &VerifyResult) -> String {
    let mut out = String::new();
    let verdict = if r.is_grounded() { "grounded" } else { "ungrounded" };
    let stage = serde_json::to_value(r.decided_at).expect("stage serializes");
    let _ = writeln!(out, "{claim}: {verdict} (decided at {})", stage.as_str().unwrap_or("?"));
    for e in &r.evidence {
        let membership = if e.in_extension { "in extension" } else { "out of extension" };
        let _ = writeln!(out, "  {} {} since T{} (created T{}), {membership}", e.argument, e.status, e.status_since, e.turn);
    }
    if !r.dep_chain.is_empty() {
        let _ = writeln!(out, "  depends on {}", list(&r.dep_chain));
    }
    for w in &r.warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
    out
}

pub fn affected(atom: &str, affected: &BTreeSet<String>, warnings: &[String]) -> String {
    let mut out = format!("affected({atom}): {{{}}}\n", list(affected));
    for w in warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn retraction(report: &RetractionReport, d: &DependencyStructure) -> String {
    let mut out = engine::render_retraction(report, d);
    if out.is_empty() {
        let _ = writeln!(out, "retracting {} changes nothing", report.retracted);
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn bench(csv: &Path, rows: &[LatencyRow], grid: &[u32], summary: Option<&ScalingSummary>) -> String {
    let mut out = format!("wrote {} ({} rows)\n", csv.display(), rows.len());
    let _ = writeln!(out, "{:>6} {:>8} {:>14} {:>14}", "K", "regime", "verifier_ns", "baseline_ns");
    for &k in grid {
        for regime in Regime::ALL {
            let cell = |m| bench::latency::cell_median(rows, k, regime, m).map_or("-".into(), |v| format!("{v:.0}"));
            let _ = writeln!(out, "{k:>6} {regime:>8} {:>14} {:>14}", cell(Method::Verifier), cell(Method::Baseline));
        }
    }
    if let Some(s) = summary {
        let _ = writeln!(out, "bounded plateau (max K / 200): {:.2}", s.plateau_ratio);
        let _ = writeln!(out, "baseline fit: slope {:.1} ns/turn, R² {:.3}", s.baseline_slope, s.baseline_r2);
        let _ = writeln!(out, "baseline/verifier at max K: {:.1}x", s.gap_at_max);
    }
    out
}

pub fn noise(csv: &Path, report: &NoiseReport, grid: &[f64]) -> String {
    let mut out = format!("wrote {} ({} rows)\n", csv.display(), report.rows.len());
    let eps: Vec<String> = grid.iter().map(|e| format!("{e:.1}")).collect();
    let _ = writeln!(out, "{:<15} {:<19} {}", "model", "category", eps.join(" "));
    for model in NoiseModel::ALL {
        for c in Category::ALL {
            let curve = bench::median_curve(&report.rows, model, c, grid);
            let vals: Vec<String> = curve.iter().map(|v| format!("{v:.2}")).collect();
            let _ = writeln!(out, "{:<15} {:<19} {}", model.name(), c.name(), vals.join(" "));
        }
    }
    let _ = writeln!(
        out,
        "pre-walk items: {}; verdict flips under noise: {}",
        report.pre_walk_items.len(),
        report.pre_walk_flips.len()
    );
    out
}

/// Median latency per K and method, log-scaled, from bench_latency.csv.
pub fn gnuplot() -> &'static str {
    r#"set datafile separator ","
set key autotitle columnhead
set logscale xy
set xlabel "K (turns)"
set ylabel "median ns"
plot "bench_latency.csv" using 1:(strcol(3) eq "verifier" && strcol(2) eq "bounded" ? $5 : 1/0) title "verifier (bounded)" with points, \
     "bench_latency.csv" using 1:(strcol(3) eq "baseline" && strcol(2) eq "bounded" ? $5 : 1/0) title "baseline (bounded)" with points
"#
}
