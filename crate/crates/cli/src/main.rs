//! Command-line front end for the credit-review model.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 internal
//! invariant violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use credit_review::analysis::{self, SweepGrid};
use credit_review::format::csv_real;
use credit_review::report::{tick_csv, RunSummary};
use credit_review::{choose_strategy, sim, threshold_unit_value, ModelParams, SimConfig, UtilityTriple};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(name = "credit-review", version)]
#[command(about = "Reporting incentives under diminishing credit value")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the reporting threshold u* and optionally evaluate a unit value
    #[command(allow_negative_numbers = true)]
    Threshold(ThresholdArgs),

    /// Run one simulation from a JSON config
    Simulate {
        /// Simulation config (JSON)
        #[arg(short, long)]
        config: PathBuf,

        /// Write the per-tick CSV here
        #[arg(long)]
        csv: Option<PathBuf>,

        /// Write the run summary JSON here
        #[arg(long)]
        summary: Option<PathBuf>,
    },

    /// Evaluate a parameter grid from a JSON config
    Sweep {
        /// Sweep config (JSON)
        #[arg(short, long)]
        config: PathBuf,

        /// Write the sweep CSV here instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },

    /// Tabulate the average submodular revenue u(n) = (alpha ln n + beta) / n
    #[command(allow_negative_numbers = true)]
    Limit {
        #[arg(long)]
        alpha: f64,

        #[arg(long, default_value_t = 0.0)]
        beta: f64,

        /// Largest n to evaluate
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,

        /// Number of log-spaced points
        #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        points: u64,
    },
}

#[derive(Args)]
struct ThresholdArgs {
    /// Model parameters (JSON with c_r, p, c_p, c_w, r); flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    /// Cost to read one comment
    #[arg(long)]
    cr: Option<f64>,

    /// Probability that a comment is malicious
    #[arg(long)]
    p: Option<f64>,

    /// Mental cost of a malicious comment
    #[arg(long)]
    cp: Option<f64>,

    /// Cost to write a report
    #[arg(long)]
    cw: Option<f64>,

    /// Credits per processed report
    #[arg(long)]
    r: Option<f64>,

    /// Unit value of one credit to evaluate
    #[arg(long)]
    u: Option<f64>,
}

enum Failure {
    Usage(String),
    Internal(String),
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let outcome = match cli.command {
        Command::Threshold(args) => threshold(args),
        Command::Simulate { config, csv, summary } => simulate(&config, csv.as_deref(), summary.as_deref()),
        Command::Sweep { config, out } => sweep(&config, out.as_deref()),
        Command::Limit { alpha, beta, max_n, points } => limit(alpha, beta, max_n, points as usize),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PartialParams {
    c_r: Option<f64>,
    p: Option<f64>,
    c_p: Option<f64>,
    c_w: Option<f64>,
    r: Option<f64>,
}

fn threshold(args: ThresholdArgs) -> CliResult {
    let file: PartialParams = match &args.config {
        Some(path) => read_json(path)?,
        None => PartialParams::default(),
    };
    let mut missing = Vec::new();
    let mut pick = |flag: Option<f64>, stored: Option<f64>, name: &'static str| {
        flag.or(stored).unwrap_or_else(|| {
            missing.push(name);
            f64::NAN
        })
    };
    let c_r = pick(args.cr, file.c_r, "--cr");
    let p = pick(args.p, file.p, "--p");
    let c_p = pick(args.cp, file.c_p, "--cp");
    let c_w = pick(args.cw, file.c_w, "--cw");
    let r = pick(args.r, file.r, "--r");
    if !missing.is_empty() {
        return Err(Failure::Usage(format!(
            "missing parameters: {}\n\nUsage: credit-review threshold --cr <CR> --p <P> --cp <CP> --cw <CW> --r <R> [--u <U>]",
            missing.join(", ")
        )));
    }
    let params = ModelParams::new(c_r, p, c_p, c_w, r).map_err(|e| Failure::Usage(e.to_string()))?;

    let u_star = threshold_unit_value(&params);
    if u_star.is_infinite() {
        let why = if params.p == 0.0 { "p = 0" } else { "r = 0" };
        println!("u* = never ({why})");
    } else {
        println!("u* = {}", csv_real(u_star));
    }

    if let Some(u) = args.u {
        if !(u.is_finite() && u >= 0.0) {
            return Err(Failure::Usage(format!("--u must be finite and >= 0 (got {u})")));
        }
        let triple = UtilityTriple::evaluate(&params, u);
        let strategy = choose_strategy(&params, u);
        println!("strategy = {strategy}, U2 = {}", csv_real(triple.u2));
        println!("U1 = {}, U3 = {}", csv_real(triple.u1), csv_real(triple.u3));
    }
    Ok(())
}

fn simulate(config: &Path, csv: Option<&Path>, summary: Option<&Path>) -> CliResult {
    let config: SimConfig = read_json(config)?;
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let result = sim::run(&config).map_err(|e| {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    })?;
    if let Some(path) = csv {
        write_file(path, &tick_csv(&result.records))?;
    }
    if let Some(path) = summary {
        write_file(path, &RunSummary::new(&config, &result).to_json())?;
    }
    match result.collapse_tick {
        Some(t) => println!("collapse_tick = {t}"),
        None => println!("collapse_tick = none"),
    }
    Ok(())
}

fn sweep(config: &Path, out: Option<&Path>) -> CliResult {
    let grid: SweepGrid = read_json(config)?;
    let table = analysis::sweep_csv(&analysis::sweep(&grid));
    match out {
        Some(path) => write_file(path, &table),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn limit(alpha: f64, beta: f64, max_n: u64, points: usize) -> CliResult {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Failure::Usage(format!("--alpha must be finite and > 0 (got {alpha})")));
    }
    if !beta.is_finite() {
        return Err(Failure::Usage(format!("--beta must be finite (got {beta})")));
    }
    let profile = analysis::submodular_limit_profile(alpha, beta, &analysis::log_spaced_points(max_n, points));
    let mut out = String::from("kind,n,u\n");
    for (n, u) in &profile.points {
        out.push_str(&format!("point,{n},{}\n", csv_real(*u)));
    }
    let peak = alpha / profile.n_max;
    out.push_str(&format!("n_max,{},{}\n", csv_real(profile.n_max), csv_real(peak)));
    print!("{out}");
    Ok(())
}
