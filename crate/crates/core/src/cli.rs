//! The `tcw` command line.
//!
//! Exit codes: 0 all asserted statistics pass, 1 a threshold failed,
//! 2 malformed config or arguments, 3 precondition refusal, 4 runtime error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{self, resolve_out_dir, ExperimentConfig, ExperimentKind, RunOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "tcw", version, about = "Time-changed Wiener process experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rescaled process against the octant-skew limit.
    Flt(RunArgs),
    /// Planar occupation functional against Exp(1).
    Kr(RunArgs),
    /// Growth of the additive functional.
    Divergence(RunArgs),
    /// Mean of the time change against its bound.
    TauMoment(RunArgs),
    /// Escape rate of Brownian motion in d >= 3.
    EscapeRate(RunArgs),
    /// Euler–Maruyama for the limit equation against the time change.
    SdeCrosscheck(RunArgs),
    /// Monte Carlo solution of the parabolic Cauchy problem.
    Cauchy(RunArgs),
    /// Check the model's assumptions only.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides monte_carlo.master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides monte_carlo.path_count.
    #[arg(long)]
    paths: Option<usize>,
    /// Output directory (overrides TCW_OUT_DIR and out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run even if the model fails the invoked theorem's assumptions.
    #[arg(long)]
    force: bool,
    /// Worker threads (default: available cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let (kind, args) = match cli.command {
        Command::Validate(args) => return validate(&args),
        Command::Flt(a) => (ExperimentKind::Flt, a),
        Command::Kr(a) => (ExperimentKind::Kr, a),
        Command::Divergence(a) => (ExperimentKind::Divergence, a),
        Command::TauMoment(a) => (ExperimentKind::TauMoment, a),
        Command::EscapeRate(a) => (ExperimentKind::EscapeRate, a),
        Command::SdeCrosscheck(a) => (ExperimentKind::SdeCrosscheck, a),
        Command::Cauchy(a) => (ExperimentKind::CauchyMc, a),
    };
    match run(kind, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tcw: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::DimensionMismatch { .. } => EXIT_CONFIG,
        Error::Refused(_) => EXIT_REFUSED,
        _ => EXIT_RUNTIME,
    }
}

fn run(kind: ExperimentKind, args: &RunArgs) -> Result<i32, Error> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.monte_carlo.master_seed = seed;
    }
    if let Some(paths) = args.paths {
        config.monte_carlo.path_count = paths;
    }
    let mut options = RunOptions {
        force: args.force,
        ..RunOptions::default()
    };
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(Error::Config("--workers must be >= 1".into()));
        }
        options.workers = w;
    }
    let out = resolve_out_dir(args.out.as_deref(), &config, kind);
    let report = experiments::run(Some(kind), &config, options)?;
    report.write(&out)?;
    println!("{report}");
    println!("wrote {}", out.display());
    Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
}

fn validate(args: &ValidateArgs) -> i32 {
    let result = ExperimentConfig::load(&args.config).and_then(|c| experiments::validate(&c));
    match result {
        Ok(report) => {
            println!("{report}");
            EXIT_PASS
        }
        Err(e) => {
            eprintln!("tcw: {e}");
            exit_code(&e)
        }
    }
}
