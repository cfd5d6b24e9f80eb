//! The `tfim` command-line driver.
//!
//! Every subcommand resolves its settings from flags, then the optional TOML file given by
//! `--config`, then built-in defaults. The worker count additionally honours the
//! `TFIM_WORKERS` environment variable, which ranks between the flag and the file.
//!
//! Exit codes: 0 success, 1 invalid arguments, 2 numerical failure, 3 oracle mismatch.

mod collapse;
mod config;
mod constants;
pub mod oracle;
mod output;
mod scaling;
mod sweep;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::model::SystemSize;

pub use config::FileConfig;
pub use output::{format_float, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

/// Environment variable overriding the configured worker count.
pub const WORKERS_ENV: &str = "TFIM_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "tfim", version, about = "Two-site entanglement of the transverse-field Ising ring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// E_v, dE_v/dλ, C and dC/dλ on a (size, λ) grid.
    Sweep(sweep::SweepArgs),
    /// Pseudo-critical drift, ln N growth at criticality and ln|λ−1| divergence.
    Scaling(scaling::ScalingArgs),
    /// Finite-size data collapse of dE_v/dλ.
    Collapse(collapse::CollapseArgs),
    /// Free-fermion engine against exact diagonalization.
    OracleCheck(oracle::OracleArgs),
    /// Closed-form values at the critical point.
    Constants(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output file; stdout when omitted. The run manifest goes next to it as
    /// `<out>.manifest.json`, or to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// TOML file with defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => EXIT_INVALID,
            _ => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses a size token: a positive integer, or `inf` / `thermodynamic` / `0`.
pub fn parse_size(s: &str) -> std::result::Result<SystemSize, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "thermodynamic" | "0" => Ok(SystemSize::Thermodynamic),
        t => t
            .parse::<usize>()
            .map(SystemSize::Finite)
            .map_err(|_| format!("not a size: {s:?} (expected an integer or `inf`)")),
    }
}

/// Settings shared by every subcommand once flags, environment and file are merged.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
}

pub(crate) fn resolve_common(common: &CommonArgs, file: &FileConfig, default_format: Format) -> CliResult<Resolved> {
    let env_workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::invalid(format!("{WORKERS_ENV}={v:?} is not a worker count")))?,
        ),
        Err(_) => None,
    };
    let workers = common
        .workers
        .or(env_workers)
        .or(file.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::invalid("worker count must be at least 1"));
    }
    Ok(Resolved {
        out: common.out.clone().or_else(|| file.out.clone()),
        format: common.format.or(file.format).unwrap_or(default_format),
        workers,
    })
}

pub(crate) fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError {
            code: EXIT_NUMERICAL,
            message: format!("cannot start worker pool: {e}"),
        })?;
    Ok(pool.install(f))
}

/// Runs the driver on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let name = match &cli.command {
        Command::Sweep(_) => "sweep",
        Command::Scaling(_) => "scaling",
        Command::Collapse(_) => "collapse",
        Command::OracleCheck(_) => "oracle-check",
        Command::Constants(_) => "constants",
    };
    let outcome = match &cli.command {
        Command::Sweep(a) => sweep::run(a),
        Command::Scaling(a) => scaling::run(a),
        Command::Collapse(a) => collapse::run(a),
        Command::OracleCheck(a) => oracle::run(a),
        Command::Constants(a) => constants::run(a),
    };
    let result = outcome.and_then(|finished| finished.emit(started.elapsed()));
    match result {
        Ok(code) => code,
        Err(e) => {
            // failed runs leave no output file, only this manifest on stderr
            let manifest = RunManifest::new(
                name,
                serde_json::Value::Null,
                started.elapsed(),
                vec![output::CheckOutcome::new("run", false, e.message.clone())],
            );
            eprint!("{}", manifest.to_json());
            eprintln!("tfim: {}", e.message);
            e.code
        }
    }
}

/// What a subcommand hands back for writing.
pub(crate) struct Finished {
    pub command: &'static str,
    pub config: serde_json::Value,
    pub out: Option<PathBuf>,
    pub body: String,
    /// Extra files written next to the main output, as `(path, contents)`.
    pub extra: Vec<(PathBuf, String)>,
    pub checks: Vec<output::CheckOutcome>,
    pub code: i32,
    pub failure: Option<String>,
}

impl Finished {
    fn emit(self, elapsed: std::time::Duration) -> CliResult<i32> {
        let manifest_json = RunManifest::new(self.command, self.config, elapsed, self.checks).to_json();
        match &self.out {
            Some(path) => {
                output::write_atomic(path, &self.body)?;
                for (p, contents) in &self.extra {
                    output::write_atomic(p, contents)?;
                }
                output::write_atomic(&output::manifest_path(path), &manifest_json)?;
            }
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(self.body.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError {
                        code: EXIT_NUMERICAL,
                        message: format!("cannot write to stdout: {e}"),
                    })?;
                for (p, contents) in &self.extra {
                    output::write_atomic(p, contents)?;
                }
                eprint!("{manifest_json}");
            }
        }
        if let Some(msg) = self.failure {
            eprintln!("tfim: {msg}");
        }
        Ok(self.code)
    }
}
