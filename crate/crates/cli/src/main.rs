//! `groundcheck`: replay scenarios, query saved snapshots, run the harnesses.
//!
//! Exit codes: 0 success (verdicts are data), 1 replay mismatches or a
//! failed operation, 2 usage or input errors.

mod text;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use argumentation::RetractMode;
use clap::{Parser, Subcommand, ValueEnum};
use engine::{snapshot, DependencyStructure, StateSnapshot, VerifyOptions};
use interpreter::{build_interpreter, InterpreterConfig, InterpreterMode, PromptCondition};
use scenarios::Scenario;
use serde::Serialize;

const OUT_DIR_VAR: &str = "GROUNDCHECK_OUT_DIR";

#[derive(Parser)]
#[command(name = "groundcheck", version, about = "Grounding checks for dialogue state")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Report file; for `bench` and `noise` the CSV directory, which
    /// otherwise comes from GROUNDCHECK_OUT_DIR or defaults to `.`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Direct,
    Cascade,
}

#[derive(Clone, Copy, ValueEnum)]
enum Condition {
    Minimal,
    Definitions,
    StateAugmented,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a scenario and check its expectations.
    Replay {
        /// Scenario file, `-` for stdin, or a shipped name (`incident`, `design_review`).
        #[arg(long)]
        scenario: String,
        /// Classify through an external adapter instead of the gold labels.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long, value_enum, default_value_t = Condition::Minimal)]
        condition: Condition,
        #[arg(long, default_value_t = 2)]
        max_reprompts: u32,
        /// Write the state to this file as a snapshot.
        #[arg(long)]
        save_snapshot: Option<PathBuf>,
        /// Snapshot the state after this turn (default: the last).
        #[arg(long, requires = "save_snapshot")]
        at: Option<u32>,
    },
    /// Is a claim grounded in a saved state?
    Verify {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        claim: String,
        /// Membership only, ignoring status.
        #[arg(long)]
        membership_only: bool,
        #[arg(long)]
        weakened_grounds: bool,
    },
    /// Accepted arguments that directly depend on an atom.
    Affected {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        atom: String,
    },
    /// Retract an atom and report what changes.
    Retract {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        atom: String,
        #[arg(long, value_enum, default_value_t = Mode::Direct)]
        mode: Mode,
    },
    /// Affected-query latency on synthetic states; writes bench_latency.csv.
    Bench {
        /// Comma-separated K values.
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_K_GRID)]
        grid: Vec<u32>,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 200)]
        queries: usize,
        #[arg(long, default_value_t = 50)]
        cap: usize,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Grounding accuracy under structural noise; writes noise.csv.
    Noise {
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Comma-separated ε values.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// Item set (default: the shipped incident items).
        #[arg(long)]
        items: Option<PathBuf>,
    },
    /// Print a muddy-children scenario.
    Muddy {
        #[arg(long)]
        n: usize,
        /// Comma-separated muddy children, e.g. `a,b`.
        #[arg(long, value_delimiter = ',')]
        muddy: Vec<String>,
    },
    /// Describe a saved state.
    Render {
        #[arg(long)]
        snapshot: PathBuf,
    },
}

/// Errors sorted by exit code.
enum Failure {
    Usage(anyhow::Error),
    Failed(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Failed(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Failed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Replay { scenario, endpoint, condition, max_reprompts, save_snapshot, at } => {
            let s = load_scenario(scenario)?;
            let config = InterpreterConfig {
                mode: if endpoint.is_some() { InterpreterMode::External } else { InterpreterMode::Scripted },
                endpoint: endpoint.clone(),
                prompt_condition: match condition {
                    Condition::Minimal => PromptCondition::Minimal,
                    Condition::Definitions => PromptCondition::Definitions,
                    Condition::StateAugmented => PromptCondition::StateAugmented,
                },
                max_reprompts: *max_reprompts,
                ..InterpreterConfig::default()
            };
            config.validate().map_err(|e| usage(anyhow!("--endpoint: {e}")))?;
            let mut interp = build_interpreter(&config, s.gold_turns()).map_err(|e| usage(anyhow!("--endpoint: {e}")))?;
            let r = scenarios::replay(&s, interp.as_mut(), &config)?;
            if let Some(path) = save_snapshot {
                let d = at.map_or(r.final_state(), |t| r.state_at(t));
                fs::write(path, snapshot(d)?.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            let body = match cli.format {
                Format::Json => r.report.to_json(),
                _ => text::replay(&r.report),
            };
            emit(cli, &body)?;
            Ok(r.report.passed())
        }
        Command::Verify { snapshot: path, claim, membership_only, weakened_grounds } => {
            let d = load_snapshot(path)?;
            let opts = VerifyOptions { membership_only: *membership_only, weakened_grounds: *weakened_grounds };
            let r = engine::verify_with(claim, &d, opts, &engine::IdentityResolver)?;
            let body = match cli.format {
                Format::Json => json(&r),
                _ => text::verify(claim, &r),
            };
            emit(cli, &body)?;
            Ok(true)
        }
        Command::Affected { snapshot: path, atom } => {
            let d = load_snapshot(path)?;
            let (affected, warnings) = engine::affected(atom, &d)?;
            let body = match cli.format {
                Format::Json => json(&serde_json::json!({ "atom": atom, "affected": affected, "warnings": warnings })),
                _ => text::affected(atom, &affected, &warnings),
            };
            emit(cli, &body)?;
            Ok(true)
        }
        Command::Retract { snapshot: path, atom, mode } => {
            let d = load_snapshot(path)?;
            let mode = match mode {
                Mode::Direct => RetractMode::Direct,
                Mode::Cascade => RetractMode::Cascade,
            };
            let report = argumentation::retract(atom, &d.af, &d.dep, mode)?;
            let body = match cli.format {
                Format::Json => json(&report),
                _ => text::retraction(&report, &d),
            };
            emit(cli, &body)?;
            Ok(true)
        }
        Command::Bench { grid, seeds, queries, cap, plot } => {
            if grid.is_empty() || *seeds == 0 || *queries == 0 {
                return Err(usage(anyhow!("--grid, --seeds and --queries must be non-empty / positive")));
            }
            let cfg = bench::LatencyConfig {
                grid: grid.clone(),
                first_seed: cli.seed,
                seeds: *seeds,
                queries: *queries,
                cap: *cap,
                ..bench::LatencyConfig::default()
            };
            let rows = bench::run_latency_suite(&cfg)?;
            let dir = out_dir(cli)?;
            let csv_path = dir.join("bench_latency.csv");
            bench::write_latency_csv(&rows, fs::File::create(&csv_path)?)?;
            if *plot {
                fs::write(dir.join("bench_latency.gp"), text::gnuplot())?;
            }
            let summary = bench::summarize(&rows, grid);
            let body = match cli.format {
                Format::Json => json(&serde_json::json!({ "csv": csv_path, "summary": summary })),
                Format::Csv => fs::read_to_string(&csv_path)?,
                Format::Text => text::bench(&csv_path, &rows, grid, summary.as_ref()),
            };
            print!("{body}");
            Ok(true)
        }
        Command::Noise { seeds, grid, items } => {
            let grid = grid.clone().unwrap_or_else(bench::default_grid);
            if grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
                return Err(usage(anyhow!("--grid: ε values must lie in [0, 1]")));
            }
            let set = match items {
                Some(p) => scenarios::grounding::GroundingSet::from_json(&read(p)?).map_err(usage)?,
                None => scenarios::grounding_items(),
            };
            let s = match set.scenario.as_str() {
                "incident" => scenarios::incident(),
                other => return Err(usage(anyhow!("--items: no shipped scenario named `{other}`"))),
            };
            let r = scenarios::replay_gold(&s)?;
            let report = bench::run_noise_suite(
                &set.items,
                |t| r.state_at(t),
                &bench::NoiseModel::ALL,
                &grid,
                cli.seed..cli.seed + seeds,
            )?;
            let csv_path = out_dir(cli)?.join("noise.csv");
            bench::write_noise_csv(&report.rows, fs::File::create(&csv_path)?)?;
            let body = match cli.format {
                Format::Json => json(&report),
                Format::Csv => fs::read_to_string(&csv_path)?,
                Format::Text => text::noise(&csv_path, &report, &grid),
            };
            print!("{body}");
            Ok(true)
        }
        Command::Muddy { n, muddy } => {
            let set = muddy.iter().cloned().collect();
            let s = scenarios::gen_muddy(*n, &set).map_err(|e| usage(anyhow!("--muddy: {e}")))?;
            emit(cli, &format!("{}\n", s.to_json()))?;
            Ok(true)
        }
        Command::Render { snapshot: path } => {
            let d = load_snapshot(path)?;
            let body = match cli.format {
                Format::Json => snapshot(&d)?.to_json(),
                _ => format!("{}\n", interpreter::render_context(PromptCondition::StateAugmented, &d)),
            };
            emit(cli, &body)?;
            Ok(true)
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("report serializes"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(anyhow!("{}: {e}", path.display())))
}

fn load_scenario(arg: &str) -> Result<Scenario, Failure> {
    let text = if arg == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).map_err(usage)?;
        buf
    } else if !Path::new(arg).exists() && arg == "incident" {
        scenarios::INCIDENT_JSON.to_string()
    } else if !Path::new(arg).exists() && arg == "design_review" {
        scenarios::DESIGN_REVIEW_JSON.to_string()
    } else {
        read(Path::new(arg))?
    };
    Scenario::from_json(&text).map_err(|e| usage(anyhow!("--scenario {arg}: {e}")))
}

fn load_snapshot(path: &Path) -> Result<DependencyStructure, Failure> {
    let flagged = |e: &dyn std::fmt::Display| usage(anyhow!("--snapshot {}: {e}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| flagged(&e))?;
    let snap = StateSnapshot::from_json(&text).map_err(|e| flagged(&e))?;
    Ok(snap.structure)
}

fn out_dir(cli: &Cli) -> Result<PathBuf, Failure> {
    let dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_VAR).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| usage(anyhow!("--out {}: {e}", dir.display())))?;
    Ok(dir)
}

/// Report to `--out` when given, else stdout.
fn emit(cli: &Cli, body: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => fs::write(path, body).map_err(|e| usage(anyhow!("--out {}: {e}", path.display()))),
        None => {
            io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}
