//! `l1agg`: fit, diagnose, oracle, bounds, experiment and summary subcommands.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 non-convergence
//! (partial output still written), 3 I/O error, 4 numeric error.

mod commands;
mod specs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use l1agg::Error;

#[derive(Debug, Parser)]
#[command(name = "l1agg", version, about = "Weighted l1-penalized aggregation of function dictionaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the penalized estimator to observed data.
    Fit(FitArgs),
    /// Gram matrix, κ, coherence and dictionary checks.
    Diagnose(DiagnoseArgs),
    /// Best k-term approximations of a known regression function.
    Oracle(OracleArgs),
    /// Evaluate the explicit tail bounds from a key=value parameter file.
    Bounds(BoundsArgs),
    /// Run a replicated simulation described by a config file.
    Experiment(ExperimentArgs),
    /// Per-cell medians and rate slopes of an experiment CSV.
    Summary(SummaryArgs),
}

#[derive(Debug, Args)]
pub struct DictArgs {
    /// fourier:<M>, coordinate:<d> or tabulated:<path>
    #[arg(long)]
    pub dict: String,
    /// Interval every coordinate ranges over, as lo:hi.
    #[arg(long, default_value = "0:1")]
    pub domain: String,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub dict: DictArgs,
    /// CSV with columns x1..xd and a response column named y.
    #[arg(long)]
    pub data: PathBuf,
    /// Tuning constant A in the penalty rate.
    #[arg(long = "A", alias = "a")]
    pub a: f64,
    /// logM, logn or explicit:<r>
    #[arg(long, default_value = "logM")]
    pub rate: String,
    #[arg(long, default_value_t = l1agg::solver::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = l1agg::solver::DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
    /// Coefficient CSV (j,lambda); written atomically.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub dict: DictArgs,
    /// uniform or grid:<path>
    #[arg(long, default_value = "uniform")]
    pub measure: String,
    /// Quadrature nodes.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Design points (x1..xd, optional y) for the empirical Gram matrix.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// One-based support indices for ρ(λ), comma-separated.
    #[arg(long)]
    pub support: Option<String>,
    /// Write the population Gram matrix as CSV.
    #[arg(long)]
    pub gram_out: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub dict: DictArgs,
    #[arg(long, default_value = "uniform")]
    pub measure: String,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// fourier, linear or tabulated:<path>
    #[arg(long)]
    pub truth: String,
    /// One-based nonzero coefficients, e.g. 2:3,4:-2,7:1
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub k_min: usize,
    /// Defaults to M.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// With --n, also report k* and the oracle memberships.
    #[arg(long = "A", alias = "a")]
    pub a: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "logM")]
    pub rate: String,
    #[arg(long, default_value_t = 1.0)]
    pub c_f: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_f_prime: f64,
    /// CSV k,residual2,support,exact; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// key=value file: n, M, r, c0, L, L0, b, C_f, kappa, M_lambda, L_lambda,
    /// and optionally B1, B2, C, C_prime, dist2 for the risk bounds.
    #[arg(long)]
    pub params: PathBuf,
    /// Restrict to these lemmas (L4, L5, L6, L7, L9); missing inputs are then errors.
    #[arg(long, value_delimiter = ',')]
    pub lemma: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `out` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the master seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the per-cell summary CSV.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SummaryArgs {
    /// Experiment CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// The experiment's config; enables the regime flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Shape(_) | Error::InvalidDictionary(_) | Error::Unsupported(_) => 1,
        Error::NonConvergence(_) => 2,
        Error::Io(_) | Error::Csv(_) => 3,
        Error::Numeric(_) | Error::Validation(_) | Error::DegenerateDictionary(_) | Error::ConditionViolated(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Summary(a) => commands::summary(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
