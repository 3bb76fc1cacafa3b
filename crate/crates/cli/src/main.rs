//! `hk`: Hilbert–Kunz and Hilbert–Samuel computations from a JSON config.
//!
//! Exit codes: 0 success or check holds, 1 check failed (or a sweep job
//! failed), 2 usage or parse error, 3 budget exhausted or inconclusive.

mod config;
mod engine;
mod output;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{load, parse_tolerance, CommandName, Format, JobConfig, SweepConfig};
use engine::{with_engine, Status};

#[derive(Parser)]
#[command(name = "hk", version, about = "Exact Hilbert-Kunz and Hilbert-Samuel invariants of monomial ideals")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON job or sweep configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Cross-check every colength with a second algorithm
    #[arg(long, global = true)]
    paranoid: bool,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Equality tolerance for numerical verdicts, e.g. 1/100 or 0.01
    #[arg(long, global = true)]
    tolerance: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal generators, mu, ord, m-primality and colength
    IdealInfo,
    /// Hilbert-Samuel samples and fitted coefficients
    HsFit,
    /// The sequence e_1(I^[q])/q^d and its extrapolated limit
    Beta,
    /// The sequence length(R/I^[q])/q^d and its extrapolated limit
    Ehk,
    /// Run one checker
    Check {
        #[arg(value_enum)]
        which: CheckKind,
    },
    /// Run a family sweep and write one table per (family, command)
    Sweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Wy,
    Northcott,
    Decompose,
    Additivity,
    Uniform,
    Bound,
}

impl From<CheckKind> for CommandName {
    fn from(c: CheckKind) -> Self {
        match c {
            CheckKind::Wy => CommandName::Wy,
            CheckKind::Northcott => CommandName::Northcott,
            CheckKind::Decompose => CommandName::Decompose,
            CheckKind::Additivity => CommandName::Additivity,
            CheckKind::Uniform => CommandName::Uniform,
            CheckKind::Bound => CommandName::Bound,
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("hk: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = cli.config.clone() else {
        return usage("--config FILE is required");
    };
    if cli.jobs == Some(0) {
        return usage("--jobs must be positive");
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    pool.install(|| run(&cli, &path))
}

fn run(cli: &Cli, path: &Path) -> ExitCode {
    let single = match cli.command {
        Command::IdealInfo => CommandName::IdealInfo,
        Command::HsFit => CommandName::HsFit,
        Command::Beta => CommandName::Beta,
        Command::Ehk => CommandName::Ehk,
        Command::Check { which } => which.into(),
        Command::Sweep => return run_sweep(cli, path),
    };
    let job: JobConfig = match load(path) {
        Ok(j) => j,
        Err(e) => return usage(e),
    };
    let mut opts = job.options();
    opts.paranoid |= cli.paranoid;
    if let Err(e) = opts.budgets.validate() {
        return usage(e);
    }
    let tol = match cli.tolerance.as_deref().or(opts.tolerance.as_deref()).map(parse_tolerance) {
        None => hk_core::invariants::default_tolerance(),
        Some(Ok(t)) => t,
        Some(Err(e)) => return usage(e),
    };
    let format = cli.format.or(opts.format).unwrap_or_default();
    let outcome = match with_engine(&job.ring, &opts, |engine| {
        engine.run(single, &job.ideal, job.module.as_ref(), &opts, &tol)
    }) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    print!("{}", output::render(&outcome, format));
    if let Some(msg) = &outcome.error {
        eprintln!("hk: {msg}");
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}

fn run_sweep(cli: &Cli, path: &Path) -> ExitCode {
    let cfg: SweepConfig = match load(path) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let mut opts = cfg.options();
    opts.paranoid |= cli.paranoid;
    if let Err(e) = opts.budgets.validate() {
        return usage(e);
    }
    let tol = match cli.tolerance.as_deref().or(opts.tolerance.as_deref()).map(parse_tolerance) {
        None => hk_core::invariants::default_tolerance(),
        Some(Ok(t)) => t,
        Some(Err(e)) => return usage(e),
    };
    let format = cli.format.or(opts.format).unwrap_or_default();
    match sweep::run(&cfg, path, &opts, &tol, format) {
        Ok(Status::Usage) => ExitCode::from(1),
        Ok(s) => ExitCode::from(s.exit_code() as u8),
        Err(e) => usage(e),
    }
}
