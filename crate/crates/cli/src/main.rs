//! Experiment driver for the `negdep-qmc` library.
//!
//! Each subcommand reads one JSON configuration (`--config <path>`, or `-`
//! for stdin) and writes CSV to `--out` or stdout. Exit codes: 0 success,
//! 1 I/O error, 2 validation error, 3 work budget exceeded, 4 failed check
//! (a failed acceptance criterion or net check, or a `violated` verdict
//! under `--expect-holds`).

mod commands;
mod config;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::commands::Ctx;
use crate::config::{Common, ReportConfig};

/// Default seed when neither the configuration nor `--seed` sets one.
pub const DEFAULT_SEED: u64 = 20_190_501;

const THREADS_ENV: &str = "NEGDEP_QMC_THREADS";

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Validation(String),
    Budget(String),
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Failed(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Validation(m) | CliError::Budget(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<negdep_qmc::Error> for CliError {
    fn from(e: negdep_qmc::Error) -> Self {
        match e {
            negdep_qmc::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "negdep-qmc", version, about = "Negative dependence and discrepancy experiments")]
struct Cli {
    /// JSON configuration file, or `-` for stdin.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap; defaults to the configuration, then NEGDEP_QMC_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (a directory for `report`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one point set and write it in the point-set text format.
    Sample,
    /// Exact star discrepancy, cover bounds and weighted discrepancy.
    Discrepancy {
        /// Also compute cover bounds at this resolution.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Sweep negative-dependence tests.
    Negdep {
        /// Add closed-form probabilities where available.
        #[arg(long)]
        oracle: bool,
        /// Exit with code 4 if any verdict is `violated`.
        #[arg(long)]
        expect_holds: bool,
    },
    /// Tabulate the discrepancy bounds over a parameter grid.
    Bounds,
    /// Compare estimator variances against Monte Carlo.
    Variance,
    /// Check the (t, m, s)-net property of Faure nets and their scramblings.
    NetCheck,
    /// Run the acceptance criteria and write a summary bundle.
    Report,
}

fn read_config<T: DeserializeOwned>(cli: &Cli) -> Result<T, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation("--config is required for this subcommand".into()))?;
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("invalid configuration: {e}")))
}

fn context(cli: &Cli, cfg: &impl Common) -> Result<Ctx, CliError> {
    let threads = match cli.threads.or(cfg.threads()) {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Validation(format!("{THREADS_ENV} must be a positive integer")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Validation("thread count must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Validation(format!("cannot set up {t} threads: {e}")))?;
    }
    Ok(Ctx {
        seed: cli.seed.or(cfg.seed()).unwrap_or(DEFAULT_SEED),
        out: cli.out.clone().or_else(|| cfg.out().cloned()),
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let failed = match &cli.command {
        Command::Sample => {
            let cfg: config::SampleConfig = read_config(cli)?;
            commands::sample_cmd(&cfg, &context(cli, &cfg)?)?;
            None
        }
        Command::Discrepancy { delta } => {
            let cfg: config::DiscrepancyConfig = read_config(cli)?;
            commands::discrepancy_cmd(&cfg, &context(cli, &cfg)?, *delta)?;
            None
        }
        Command::Negdep { oracle, expect_holds } => {
            let cfg: config::NegdepConfig = read_config(cli)?;
            let violated = commands::negdep_cmd(&cfg, &context(cli, &cfg)?, *oracle || cfg.oracle)?;
            (violated && *expect_holds).then_some("a dependence inequality was violated")
        }
        Command::Bounds => {
            let cfg: config::BoundsConfig = read_config(cli)?;
            commands::bounds_cmd(&cfg, &context(cli, &cfg)?)?;
            None
        }
        Command::Variance => {
            let cfg: config::VarianceConfig = read_config(cli)?;
            commands::variance_cmd(&cfg, &context(cli, &cfg)?)?;
            None
        }
        Command::NetCheck => {
            let cfg: config::NetCheckConfig = read_config(cli)?;
            commands::net_check_cmd(&cfg, &context(cli, &cfg)?)?.then_some("a point set is not a net")
        }
        Command::Report => {
            let cfg: ReportConfig = if cli.config.is_some() { read_config(cli)? } else { ReportConfig::default() };
            commands::report_cmd(&cfg, &context(cli, &cfg)?)?.then_some("an acceptance criterion failed")
        }
    };
    match failed {
        Some(msg) => Err(CliError::Failed(msg.into())),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
