//! Command-line front end: argument parsing, configuration and exit codes.
//!
//! Exit codes: 0 success, 2 input error, 3 size guard, 4 internal failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::annealsim::AnnealError;
use crate::codes::CodeError;
use crate::distance::DistanceError;
use crate::qubo::pipeline::BuildMode;
use crate::qubo::{AuxWidthMode, QuboError};
use crate::solvers::{DecomposeParams, SaParams, SolverError};

pub use commands::{
    cmd_anneal, cmd_bench, cmd_distance, cmd_export, cmd_qubo, cmd_solve, cmd_validate, BenchRow, RunRecord,
    BENCH_HEADER,
};
pub use config::Config;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    SizeGuard(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::SizeGuard(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<QuboError> for CliError {
    fn from(e: QuboError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::TooLarge { .. } | SolverError::ComponentTooLarge { .. } => CliError::SizeGuard(e.to_string()),
            SolverError::InvalidParams(_) | SolverError::BadBranchVariable(_) => CliError::Input(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<DistanceError> for CliError {
    fn from(e: DistanceError) -> Self {
        match e {
            DistanceError::TooLarge { .. } => CliError::SizeGuard(e.to_string()),
            DistanceError::Empty => CliError::Input(e.to_string()),
        }
    }
}

impl From<AnnealError> for CliError {
    fn from(e: AnnealError) -> Self {
        match e {
            AnnealError::TooLarge { .. } => CliError::SizeGuard(e.to_string()),
            AnnealError::NormDrift { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Exact,
    Sa,
    Decomposed,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Exact => "exact",
            SolverKind::Sa => "sa",
            SolverKind::Decomposed => "decomposed",
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "qdist", version, about = "Minimum distance of stabilizer codes through QUBO formulations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Master seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Wall-clock budget in seconds for the decomposition solver.
    #[arg(long, global = true)]
    pub time_budget: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Flat key-value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Append run records to this line-delimited JSON log.
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BuildArgs {
    /// penalty, split, selfdual or circulant.
    #[arg(long)]
    pub mode: Option<BuildMode>,
    /// Uniform auxiliary widths `s`, `s`, `2s` instead of per-block widths.
    #[arg(long)]
    pub uniform_widths: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// Annealing sweeps per restart.
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Independent annealing restarts.
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub initial_temperature: Option<f64>,
    #[arg(long)]
    pub cooling: Option<f64>,
    #[arg(long)]
    pub subproblem_size: Option<usize>,
    #[arg(long)]
    pub exact_threshold: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a code file and report its parameters.
    Validate { codefile: PathBuf },
    /// Build QUBO instances for a code and write them in the text format.
    Qubo {
        codefile: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        /// Output path; split mode appends `_<i>` before the extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimize a QUBO file, or every instance built from a code file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the decomposition trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Brute-force minimum distance.
    Distance { codefile: PathBuf },
    /// Simulate annealing over a grid of anneal times.
    Anneal {
        /// Code, QUBO or Ising file.
        file: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        /// Comma-separated anneal times.
        #[arg(long, value_delimiter = ',')]
        ta_grid: Option<Vec<f64>>,
        /// Schedule file with header `gamma A B`.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Integrator steps (default max(2000, 200 t_a)).
        #[arg(long)]
        steps: Option<usize>,
        /// Success probability reported as reached.
        #[arg(long)]
        threshold: Option<f64>,
        /// CSV of `t_a,P_s` (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append `code_id,degeneracy,t_a_at_threshold` to this CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Seeded solver runs over a list of codes, one CSV row per code.
    Bench {
        /// Code files to benchmark.
        codefiles: Vec<PathBuf>,
        /// Add the best zero-diagonal circulant code for every length in `LO-HI`.
        #[arg(long)]
        circulants: Option<String>,
        /// Seeded runs per code (default 40).
        #[arg(long)]
        runs: Option<usize>,
        #[command(flatten)]
        build: BuildArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the structured JSON form of QUBO instances.
    Export {
        /// Code or QUBO file.
        file: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Global settings after merging flags, configuration and defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub time_budget: Option<Duration>,
    pub format: Option<Format>,
    pub log: Option<PathBuf>,
    pub config: Config,
}

impl Settings {
    pub fn resolve(global: &GlobalArgs) -> Result<Self, CliError> {
        let config = match &global.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let format = match (global.format, config.format.as_deref()) {
            (Some(f), _) => Some(f),
            (None, Some(s)) => Some(Format::from_str(s, true).map_err(|_| CliError::Input(format!("config: unknown format {s:?}")))?),
            (None, None) => None,
        };
        let budget = global.time_budget.or(config.time_budget);
        if let Some(b) = budget {
            if !(b > 0.0 && b.is_finite()) {
                return Err(CliError::Input("time budget must be positive".into()));
            }
        }
        Ok(Self {
            seed: global.seed.or(config.seed).unwrap_or(0),
            time_budget: budget.map(Duration::from_secs_f64),
            format,
            log: global.log.clone().or_else(|| config.log.clone()),
            config,
        })
    }

    pub fn widths(&self, b: &BuildArgs) -> AuxWidthMode {
        if b.uniform_widths || self.config.uniform_widths.unwrap_or(false) {
            AuxWidthMode::Uniform
        } else {
            AuxWidthMode::Tight
        }
    }

    pub fn mode(&self, b: &BuildArgs) -> Result<Option<BuildMode>, CliError> {
        match (b.mode, self.config.mode.as_deref()) {
            (Some(m), _) => Ok(Some(m)),
            (None, Some(s)) => s.parse().map(Some).map_err(|e| CliError::Input(format!("config: {e}"))),
            (None, None) => Ok(None),
        }
    }

    pub fn solver(&self, s: &SolverArgs, default: SolverKind) -> Result<SolverKind, CliError> {
        match (s.solver, self.config.solver.as_deref()) {
            (Some(k), _) => Ok(k),
            (None, Some(name)) => {
                SolverKind::from_str(name, true).map_err(|_| CliError::Input(format!("config: unknown solver {name:?}")))
            }
            (None, None) => Ok(default),
        }
    }

    pub fn sa_params(&self, s: &SolverArgs) -> SaParams {
        let d = SaParams::default();
        let c = &self.config;
        SaParams {
            sweeps: s.sweeps.or(c.sweeps).unwrap_or(d.sweeps),
            restarts: s.restarts.or(c.restarts).unwrap_or(d.restarts),
            initial_temperature: s.initial_temperature.or(c.initial_temperature),
            cooling: s.cooling.or(c.cooling).unwrap_or(d.cooling),
            final_temperature: d.final_temperature,
            seed: self.seed,
        }
    }

    pub fn decompose_params(&self, s: &SolverArgs) -> DecomposeParams {
        let d = DecomposeParams::default();
        let c = &self.config;
        DecomposeParams {
            subproblem_size: s.subproblem_size.or(c.subproblem_size).unwrap_or(d.subproblem_size),
            exact_threshold: s.exact_threshold.or(c.exact_threshold).unwrap_or(d.exact_threshold),
            rounds: s.rounds.or(c.rounds).unwrap_or(d.rounds),
            patience: s.patience.or(c.patience).unwrap_or(d.patience),
            time_budget: self.time_budget,
            seed: self.seed,
            ..d
        }
    }
}

/// Parses `args`, runs the selected command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.global)?;
    let threads = cli.global.threads.or(settings.config.threads);
    let mut buf: Vec<u8> = Vec::new();
    let mut body = || -> Result<(), CliError> {
        let out: &mut dyn Write = &mut buf;
        match &cli.command {
            Command::Validate { codefile } => cmd_validate(codefile, out),
            Command::Qubo { codefile, build, out: path } => cmd_qubo(codefile, build, path, &settings, out).map(|_| ()),
            Command::Solve {
                file,
                build,
                solver,
                trace,
            } => cmd_solve(file, build, solver, trace.as_deref(), &settings, out).map(|_| ()),
            Command::Distance { codefile } => cmd_distance(codefile, &settings, out).map(|_| ()),
            Command::Anneal { .. } => cmd_anneal(&cli.command, &settings, out).map(|_| ()),
            Command::Bench { .. } => cmd_bench(&cli.command, &settings, out).map(|_| ()),
            Command::Export { file, build, out: path } => cmd_export(file, build, path, &settings, out),
        }
    };
    let result = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    };
    out.write_all(&buf)?;
    out.flush()?;
    result
}
