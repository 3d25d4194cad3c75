// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use nodeflow::fixtures::{fixture, FIXTURE_NAMES};
use nodeflow::fuzz::{generate_random, FuzzConfig};
use nodeflow::report::{parse_flows, trajectory_csv, write_results, Format};
use nodeflow::scenario::{parse_scenario, write_scenario};
use nodeflow::{certify, flow_distance, integrate, solve, NodeSpec, OracleConfig};

#[derive(Parser)]
#[command(name = "nodeflow", version, about = "Junction flows as hybrid automaton executions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario with the event-triggered solver.
    Solve {
        file: PathBuf,
        /// Write breakpoint rows (t, mode bitmask, flattened x) as CSV.
        #[arg(long, value_name = "OUT")]
        trajectory: Option<PathBuf>,
        #[arg(long, default_value = "toml")]
        format: Format,
    },
    /// Integrate a scenario with fixed forward steps.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long, default_value = "toml")]
        format: Format,
    },
    /// Check a flow document against a scenario.
    Verify {
        file: PathBuf,
        #[arg(long, value_name = "FLOWFILE")]
        flows: PathBuf,
    },
    /// Compare solver and oracle on random scenarios and certify every solution.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Allowed distance, relative to max(1, largest supply).
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// List the built-in junctions, or print one as a scenario document.
    Fixtures { name: Option<String> },
}

enum Failure {
    /// Bad files, flags or documents.
    Input(anyhow::Error),
    /// A check or comparison did not pass; the report is already printed.
    Rejected,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_spec(path: &Path) -> anyhow::Result<NodeSpec> {
    parse_scenario(&read(path)?).with_context(|| format!("invalid scenario {}", path.display()))
}

fn run_solve(file: &Path, trajectory: Option<&Path>, format: Format) -> Result<(), Failure> {
    let spec = load_spec(file)?;
    let sol = solve(&spec).context("solver failed")?;
    if let Some(out) = trajectory {
        fs::write(out, trajectory_csv(&sol.trajectory))
            .with_context(|| format!("cannot write {}", out.display()))?;
    }
    print!("{}", write_results(&sol.flows, trajectory.map(|_| &sol.trajectory), format));
    Ok(())
}

fn run_oracle(file: &Path, dt: f64, format: Format) -> Result<(), Failure> {
    let spec = load_spec(file)?;
    let flows = integrate(&spec, &OracleConfig::with_dt(dt)).context("integration failed")?;
    print!("{}", write_results(&flows, None, format));
    Ok(())
}

fn run_verify(file: &Path, flows: &Path) -> Result<(), Failure> {
    let spec = load_spec(file)?;
    let f = parse_flows(&read(flows)?).with_context(|| format!("invalid flows {}", flows.display()))?;
    let report = certify(&spec, &f).context("cannot verify")?;
    println!("{report}");
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

struct FuzzRow {
    dims: String,
    distance: f64,
    failed_checks: Vec<String>,
}

fn fuzz_one(cfg: &FuzzConfig, index: usize, dt: f64) -> anyhow::Result<FuzzRow> {
    let spec = generate_random(cfg, index);
    let exact = solve(&spec).with_context(|| format!("scenario {index}: solver failed"))?;
    let dense = integrate(&spec, &OracleConfig::with_dt(dt))
        .with_context(|| format!("scenario {index}: integration failed"))?;
    let scale = spec.supplies().iter().copied().fold(1.0, f64::max);
    let distance = flow_distance(&exact.flows, &dense)? / scale;
    let report = certify(&spec, &exact.flows)?;
    Ok(FuzzRow {
        dims: spec.dims().to_string(),
        distance,
        failed_checks: report
            .failed()
            .map(|c| format!("{} {:.3e}", c.name, c.residual))
            .collect(),
    })
}

fn run_fuzz(seed: u64, count: usize, dt: f64, tol: f64) -> Result<(), Failure> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(anyhow!("--dt must be positive").into());
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(anyhow!("--tol must be non-negative").into());
    }
    let cfg = FuzzConfig {
        count,
        ..FuzzConfig::with_seed(seed)
    };
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(count.max(1));
    let mut rows: Vec<Option<anyhow::Result<FuzzRow>>> = (0..count).map(|_| None).collect();
    thread::scope(|s| {
        let chunk = count.div_ceil(workers).max(1);
        for (w, slot) in rows.chunks_mut(chunk).enumerate() {
            let cfg = &cfg;
            s.spawn(move || {
                for (k, out) in slot.iter_mut().enumerate() {
                    *out = Some(fuzz_one(cfg, w * chunk + k, dt));
                }
            });
        }
    });

    let mut text = String::new();
    let mut worst = (0.0_f64, 0usize);
    let mut over = 0usize;
    let mut rejected = 0usize;
    for (k, row) in rows.into_iter().enumerate() {
        let row = row.expect("every scenario is evaluated")?;
        if row.distance > worst.0 {
            worst = (row.distance, k);
        }
        if row.distance > tol {
            over += 1;
            writeln!(text, "scenario {k} ({}): distance {:.3e} > {tol:e}", row.dims, row.distance).unwrap();
        }
        if !row.failed_checks.is_empty() {
            rejected += 1;
            writeln!(text, "scenario {k} ({}): certify failed: {}", row.dims, row.failed_checks.join(", "))
                .unwrap();
        }
    }
    writeln!(text, "seed {seed}, {count} scenarios, dt {dt:e}").unwrap();
    writeln!(text, "max scaled distance {:.3e} (scenario {}), tolerance {tol:e}", worst.0, worst.1).unwrap();
    writeln!(text, "over tolerance: {over}").unwrap();
    writeln!(text, "certified: {}/{count}", count - rejected).unwrap();
    print!("{text}");
    if over == 0 && rejected == 0 {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn run_fixtures(name: Option<&str>) -> Result<(), Failure> {
    match name {
        None => {
            for n in FIXTURE_NAMES {
                println!("{n}");
            }
        }
        Some(n) => {
            let spec = fixture(n).ok_or_else(|| {
                anyhow!("unknown fixture `{n}` (known: {})", FIXTURE_NAMES.join(", "))
            })?;
            print!("{}", write_scenario(&spec, Some(n)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve {
            file,
            trajectory,
            format,
        } => run_solve(file, trajectory.as_deref(), *format),
        Command::Oracle { file, dt, format } => run_oracle(file, *dt, *format),
        Command::Verify { file, flows } => run_verify(file, flows),
        Command::Fuzz {
            seed,
            count,
            dt,
            tol,
        } => run_fuzz(*seed, *count, *dt, *tol),
        Command::Fixtures { name } => run_fixtures(name.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
