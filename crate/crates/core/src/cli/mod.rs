//! Command-line surface.
//!
//! | command    | exit codes |
//! |------------|------------|
//! | `solve`    | 0 all checks pass, 1 error or failed check, 2 no bound state, 3 W-assumption failure |
//! | `validate` | 0 all checks pass, 1 parse error or failed check |
//! | `boost`    | 0 ok, 1 error or refinement order below 1.8 |
//! | `sweep-q`  | 0 ok, 1 error |
//! | `check-w`  | 0 all assumptions hold, 1 error, 3 some assumption fails |
//! | `plot`     | 0 ok, 1 error |
//!
//! Any malformed invocation exits with 64. `GAUGEWAVE_THREADS` caps the
//! worker pool.

mod commands;
pub mod config;
pub mod frame_file;
pub mod io;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
pub use config::{FamilyName, ModelConfig, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_BOUND_STATE: i32 = 2;
pub const EXIT_ASSUMPTION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const THREADS_ENV: &str = "GAUGEWAVE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gaugewave", version, about = "Solitary waves of the Abelian-gauge Klein-Gordon-Maxwell system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize J on the constraint set and write the solution.
    Solve(SolveArgs),
    /// Re-run every check against a stored solution.
    Validate(ValidateArgs),
    /// Boost a stored solution onto a Cartesian grid and report Maxwell residuals.
    Boost(BoostArgs),
    /// Solve over a range of couplings q.
    #[command(name = "sweep-q")]
    SweepQ(SweepArgs),
    /// Check the hypotheses on W and print the frequency window.
    #[command(name = "check-w")]
    CheckW(CheckWArgs),
    /// Render a solution profile or a sweep CSV as SVG.
    Plot(PlotArgs),
}

/// Model selection shared by several commands; flags override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Family of W.
    #[arg(long = "w", alias = "family", value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub m0: Option<f64>,
    /// Saturation amplitude of the saturable family.
    #[arg(long)]
    pub s0: Option<f64>,
    /// Exponent of the power-law family.
    #[arg(long)]
    pub p: Option<f64>,
    /// Two-column CSV (s, W(s)); implies the tabulated family.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

impl ModelArgs {
    pub fn apply(&self, model: &mut ModelConfig) {
        if let Some(f) = self.family {
            model.family = f;
        }
        if let Some(v) = self.m0 {
            model.m0 = v;
        }
        if let Some(v) = self.s0 {
            model.s0 = v;
        }
        if let Some(v) = self.p {
            model.p = v;
        }
        if let Some(t) = &self.table {
            model.table = Some(t.clone());
            if self.family.is_none() {
                model.family = FamilyName::Tabulated;
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub sigma2: f64,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Solution document; the CSV profile and run record go next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Run the minimizer even if W fails an assumption.
    #[arg(long)]
    pub skip_w_check: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoostArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub v: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// Nodes per axis.
    #[arg(long)]
    pub grid: usize,
    #[arg(long)]
    pub halfwidth: f64,
    /// Frame file; the residual report goes next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Repeat on a grid with twice as many nodes per axis and report orders.
    #[arg(long)]
    pub refine: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub qmin: f64,
    #[arg(long)]
    pub qmax: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub sigma2: f64,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output; the SVG plot and run record go next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckWArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Largest |s| sampled; default 1e3 times the amplitude scale of W.
    #[arg(long)]
    pub s_max: Option<f64>,
    /// Frequency at which the Berestycki-Lions conditions are checked.
    #[arg(long)]
    pub omega0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Solution document, or a sweep CSV (by `.csv` extension).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Assumption(String),
    Checks(Vec<String>),
    Lib(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Assumption(_) => EXIT_ASSUMPTION,
            Failure::Checks(_) => EXIT_ERROR,
            Failure::Lib(Error::NoBoundState(_)) => EXIT_NO_BOUND_STATE,
            Failure::Lib(_) => EXIT_ERROR,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Assumption(m) => write!(f, "W-assumption failure\n{m}"),
            Failure::Checks(names) => write!(f, "failed checks: {}", names.join(", ")),
            Failure::Lib(e) => write!(f, "error: {e}"),
        }
    }
}

pub type CmdResult = std::result::Result<(), Failure>;

fn thread_count() -> std::result::Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("{THREADS_ENV} = {s:?} must be a positive integer"))),
        },
    }
}

pub fn execute(command: Command) -> CmdResult {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure::Lib(Error::InvalidArgument(e.to_string())))?;
    pool.install(|| match command {
        Command::Solve(a) => commands::solve(&a),
        Command::Validate(a) => commands::validate(&a),
        Command::Boost(a) => commands::boost(&a),
        Command::SweepQ(a) => commands::sweep(&a),
        Command::CheckW(a) => commands::check_w(&a),
        Command::Plot(a) => commands::plot(&a),
    })
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("{failure}");
            failure.exit_code()
        }
    }
}
