//! Terminal front end for the survival-probability toolkit.
//!
//! Seven subcommands cover the workflow end to end: `solve` produces a
//! field on a grid, `boundary` and `classify` interrogate the closed-form
//! spend-it-all curves, `check` replays the monotonicity and boundary
//! verification passes against a stored field, `asymptotics` measures
//! small-time regime convergence on purpose-built corner grids,
//! `simulate` evaluates firing policies by Monte Carlo, and `figure`
//! emits plot data for the small-time allocation approximation.
//!
//! Exit codes are a stable contract: `0` success, `1` computational
//! failure (I/O, corrupt input, solver error), `2` usage error (bad
//! flags, bad config values, or precondition violations). A `key=value`
//! file passed with `--config` fills in any flag omitted on the command
//! line; explicit flags always win. `BOMBER_THREADS` caps the worker
//! count. Reruns with identical inputs write byte-identical files —
//! summaries and timings go to stdout, never into output file bodies.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Command failures, split by the exit code they map to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values, or precondition violations → exit 2.
    Usage(String),
    /// The computation itself failed → exit 1.
    Failed(String),
}

impl From<bomber_solver::SolverError> for CliError {
    fn from(e: bomber_solver::SolverError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<bomber_analysis::AnalysisError> for CliError {
    fn from(e: bomber_analysis::AnalysisError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("i/o: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "bomber",
    version,
    about = "Optimal-allocation survival fields: solve, verify, and simulate"
)]
pub struct Cli {
    /// key=value file whose entries fill in flags omitted on the command line
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve the allocation problem on a grid and write the field to disk
    Solve(SolveArgs),
    /// Tabulate the spend-it-all boundary curves f_u and g_u over a time sweep
    Boundary(BoundaryArgs),
    /// Classify one (x, t) point against the spend-it-all boundary
    Classify(ClassifyArgs),
    /// Run monotonicity and boundary checks against a stored field
    Check(CheckArgs),
    /// Measure small-time regime convergence on corner grids
    Asymptotics(AsymptoticsArgs),
    /// Estimate the survival probability of a firing policy by Monte Carlo
    Simulate(SimulateArgs),
    /// Emit plot data for the small-time allocation approximation
    Figure(FigureArgs),
}

/// Container formats for solved fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Compact container holding all three surfaces bit-exactly.
    Binary,
    /// Self-describing container holding all three surfaces bit-exactly.
    Json,
    /// One surface as `x,t,value` rows; cannot be read back.
    Csv,
}

/// Which surface a csv export carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurfaceKind {
    /// Survival probability.
    P,
    /// Optimal allocation.
    K,
    /// Conditional survival value.
    H,
}

/// Firing policies the simulator can play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyKind {
    /// Interpolate the allocation surface of a stored field.
    FromField,
    /// Fire the whole remaining stock at every encounter.
    SpendItAll,
    /// Fire a fixed fraction of the remaining stock.
    FixedFraction,
    /// Split near-optimally between the first two encounters.
    TwoStage,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Kill probability v in (0, 1] (required here or in the config file)
    #[arg(long)]
    pub v: Option<f64>,
    /// Largest ammunition stock on the grid [default: 12]
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Number of ammunition nodes [default: 1201]
    #[arg(long)]
    pub nx: Option<usize>,
    /// Largest remaining time on the grid [default: 5]
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of time nodes [default: 2001]
    #[arg(long)]
    pub nt: Option<usize>,
    /// Restrict allocations to whole multiples of this unit
    #[arg(long, value_name = "STEP")]
    pub discrete_step: Option<f64>,
    /// Output path for the solved field (required here or in the config file)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Container format [default: inferred from the extension, else binary]
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Surface exported when the format is csv [default: p]
    #[arg(long, value_enum)]
    pub kind: Option<SurfaceKind>,
}

#[derive(Args)]
pub struct BoundaryArgs {
    /// Kill probability v in (0, 1]
    #[arg(long)]
    pub v: Option<f64>,
    /// Smallest time in the sweep (positive)
    #[arg(long)]
    pub tmin: Option<f64>,
    /// Largest time in the sweep
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of rows, spaced evenly over [tmin, tmax]
    #[arg(long)]
    pub steps: Option<usize>,
    /// Output path [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Kill probability v in (0, 1]
    #[arg(long)]
    pub v: Option<f64>,
    /// Ammunition stock (positive)
    #[arg(long)]
    pub x: Option<f64>,
    /// Remaining time (positive)
    #[arg(long)]
    pub t: Option<f64>,
    /// Trust the outer boundary as exact inside the undetermined band
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Stored field to verify (binary or json)
    #[arg(long, value_name = "PATH")]
    pub field: Option<PathBuf>,
    /// Monotonicity tolerance as a multiple of the grid spacing [default: 2]
    #[arg(long, value_name = "FACTOR")]
    pub tolerance_factor: Option<f64>,
    /// Also recover the empirical spend-it-all boundary and compare it
    #[arg(long)]
    pub boundary: bool,
    /// Write all reports as one JSON document to this path
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args)]
pub struct AsymptoticsArgs {
    /// Kill probability v in (0, 1]
    #[arg(long)]
    pub v: Option<f64>,
    /// Ratio |log t|/x held fixed across the sweep (positive)
    #[arg(long)]
    pub rho: Option<f64>,
    /// Times to measure at, each in (0, 1)
    #[arg(long = "t", value_name = "T", num_args = 1..)]
    pub t: Vec<f64>,
    /// Restrict allocations to whole multiples of this unit
    #[arg(long, value_name = "STEP")]
    pub discrete_step: Option<f64>,
    /// Output path [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Firing policy to play
    #[arg(long, value_enum)]
    pub policy: Option<PolicyKind>,
    /// Stored field backing the from-field policy
    #[arg(long, value_name = "PATH")]
    pub field: Option<PathBuf>,
    /// Stock fraction fired by the fixed-fraction policy, in (0, 1]
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Kill probability v in (0, 1]
    #[arg(long)]
    pub v: Option<f64>,
    /// Starting ammunition stock (nonnegative)
    #[arg(long)]
    pub x0: Option<f64>,
    /// Starting time horizon (positive)
    #[arg(long)]
    pub t0: Option<f64>,
    /// Number of independent trials [default: 200000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed; each trial draws from its own stream [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the report as JSON to this path
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct FigureArgs {
    /// Time at which to sample the approximation, in (0, 1)
    #[arg(long)]
    pub t: Option<f64>,
    /// Largest stock sampled [default: 11·|log t|, covering four regimes]
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Number of evenly spaced samples [default: 400]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output path [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Applies the `BOMBER_THREADS` cap before any parallel region spins up.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("BOMBER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "BOMBER_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failed(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| commands::run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
