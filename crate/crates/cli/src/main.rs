//! `synmom` command line: identifiability checks, syndrome simulation,
//! channel estimation, and the property-verification suites.
//!
//! Exit codes: 0 success (and identifiable), 1 not identifiable or a
//! failed verification suite, 2 estimation infeasible (non-positive
//! moments or rank deficiency), 3 input error.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};

use config::{Mode, Overrides};
use synmom::noise::SupportMetric;

/// Environment variable selecting the default worker thread count.
const THREADS_ENV: &str = "SYNMOM_THREADS";

#[derive(Parser)]
#[command(
    name = "synmom",
    version,
    about = "Pauli-channel estimation from syndrome statistics"
)]
struct Cli {
    /// Worker threads (defaults to SYNMOM_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print code parameters, distances, and group size.
    CodeInfo(CodeInfoArgs),
    /// Check whether a support family is identifiable from syndromes.
    Check(RunArgs),
    /// Sample syndrome rounds and print the histogram.
    Simulate(RunArgs),
    /// Estimate channel parameters from exact or sampled moments.
    Estimate(RunArgs),
    /// Run a property-verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CodeInfoArgs {
    /// Catalog name (five_qubit, steane, hamming74, repetition, toric)
    /// or a code file path when --file is set.
    code: String,
    /// Treat CODE as a file path.
    #[arg(long)]
    file: bool,
    /// Block size for repetition codes.
    #[arg(short = 'n', long)]
    n: Option<usize>,
    /// Lattice size for toric codes.
    #[arg(short = 'L', long = "L")]
    l: Option<usize>,
    /// Distance search cap.
    #[arg(long, default_value_t = 6)]
    max_weight: usize,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (JSON). Flags override its fields.
    #[arg(long)]
    config: Option<String>,
    /// Catalog code name.
    #[arg(long)]
    code: Option<String>,
    /// Code file path.
    #[arg(long)]
    code_file: Option<String>,
    /// Catalog parameter (repetition block size or toric lattice size).
    #[arg(short = 'L', long = "param", alias = "L", short_alias = 'n')]
    param: Option<usize>,
    /// Weight-t support family (identifiability checks).
    #[arg(short, long)]
    t: Option<usize>,
    /// Support metric for --t.
    #[arg(long, value_parser = parse_metric)]
    metric: Option<SupportMetric>,
    /// Uniform per-qubit rates p_I,p_X,p_Z,p_Y.
    #[arg(long, value_parser = parse_rates)]
    rates: Option<std::vec::Vec<f64>>,
    /// Shared flip rate on every measurement bit (with --rates).
    #[arg(long)]
    meas_flip: Option<f64>,
    /// exact | sample.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Write the rate table as CSV here.
    #[arg(long)]
    csv: Option<String>,
    /// Clamp non-positive empirical moments instead of failing.
    #[arg(long)]
    clamp: bool,
    /// Skip the identifiability gate (estimation only).
    #[arg(long)]
    force: bool,
    /// Variance-weighted least squares.
    #[arg(long)]
    weighted: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// orthogonal-array | intersection-matrix | schur-chain |
    /// rank-condition | symmetries
    suite: String,
    /// Catalog code name (orthogonal-array, symmetries).
    #[arg(long, default_value = "five_qubit")]
    code: String,
    /// Catalog parameter.
    #[arg(short = 'L', long = "param", alias = "L", short_alias = 'n')]
    param: Option<usize>,
    /// Ground-set size (intersection-matrix, schur-chain).
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Max subset size (intersection-matrix, schur-chain).
    #[arg(long, default_value_t = 3)]
    t: usize,
    /// Max support size (orthogonal-array).
    #[arg(long, default_value_t = 3)]
    max_size: usize,
    /// Random instances (rank-condition).
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 20260809)]
    seed: u64,
}

fn parse_metric(s: &str) -> Result<SupportMetric, String> {
    match s {
        "hamming" => Ok(SupportMetric::Hamming),
        "pauli" => Ok(SupportMetric::Pauli),
        other => Err(format!("unknown metric `{other}` (hamming | pauli)")),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "exact" => Ok(Mode::Exact),
        "sample" => Ok(Mode::Sample),
        other => Err(format!("unknown mode `{other}` (exact | sample)")),
    }
}

fn parse_rates(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if parts.len() != 4 {
        return Err("expected four comma-separated rates p_I,p_X,p_Z,p_Y".into());
    }
    Ok(parts)
}

/// CLI-level error carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn from_core(err: synmom::Error) -> Self {
        let code = match &err {
            synmom::Error::NotIdentifiable(_) => 1,
            synmom::Error::NonPositiveMoment { .. } | synmom::Error::RankDeficient { .. } => 2,
            _ => 3,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            code: self.code.clone(),
            code_file: self.code_file.clone(),
            param: self.param,
            t: self.t,
            metric: self.metric,
            rates: self.rates.as_ref().map(|r| [r[0], r[1], r[2], r[3]]),
            meas_flip: self.meas_flip,
            mode: self.mode,
            shots: self.shots,
            seed: self.seed,
            report: self.out.clone(),
            csv: self.csv.clone(),
        }
    }

    fn effective_config(&self) -> Result<config::ExperimentConfig, CliError> {
        let base = match &self.config {
            Some(path) => Some(config::ExperimentConfig::from_file(path)?),
            None => None,
        };
        self.overrides().apply(base)
    }
}

fn main() {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(threads) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let outcome = match cli.command {
        Command::CodeInfo(args) => commands::code_info(&args),
        Command::Check(args) => commands::check(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Estimate(args) => commands::estimate(&args),
        Command::Verify(args) => commands::verify(&args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            std::process::exit(err.code);
        }
    }
}
