//! Command-line front end for `qcorr`: state measurement, relaxation
//! trajectories, direct-protocol comparison and batch property campaigns.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 invalid state,
//! 4 property violation in `batch`.

pub mod batch;
pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::batch::BatchOptions;
use crate::config::{ExperimentConfig, Format, Overrides};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "qcorr", version, about = "Geometric discord and related correlation measures for 2⊗d states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print D_G, Q, θ, Q_N and negativity of a state.
    Measure(RunArgs),
    /// Relax a Bell-diagonal state and write the measures over time.
    Evolve(RunArgs),
    /// Compare the direct rotation+CNOT readout with full tomography.
    Protocol(RunArgs),
    /// Cross-check the measures on random states.
    Batch(BatchArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// State file (JSON).
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Experiment config (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Keep the local Bloch vector of A in S (default true).
    #[arg(long = "include-local-bloch", num_args = 0..=1, default_missing_value = "true")]
    pub include_local_bloch: Option<bool>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Random states per dimension.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dimensions d of subsystem B, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub dims: Vec<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            state: self.state.clone(),
            t_max: self.t_max,
            dt: self.dt,
            points: self.points,
            shots: self.shots,
            seed: self.seed,
            epsilon: self.epsilon,
            output: self.output.clone(),
            format: self.format,
            include_local_bloch: self.include_local_bloch,
        }
    }

    fn config(&self) -> CliResult<ExperimentConfig> {
        ExperimentConfig::load(self.config.as_deref(), &self.overrides())
    }
}

impl BatchArgs {
    fn options(&self) -> CliResult<BatchOptions> {
        let o = Overrides { seed: self.seed, output: self.output.clone(), format: self.format, ..Default::default() };
        let cfg = ExperimentConfig::load(self.config.as_deref(), &o)?;
        Ok(BatchOptions {
            n: self.n,
            seed: cfg.seed.unwrap_or(0),
            dims: self.dims.clone(),
            output: cfg.output,
            format: cfg.format,
        })
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Measure(a) => commands::cmd_measure(&a.config()?, out),
        Command::Evolve(a) => commands::cmd_evolve(&a.config()?, out),
        Command::Protocol(a) => commands::cmd_protocol(&a.config()?, out),
        Command::Batch(a) => batch::cmd_batch(&a.options()?, out),
    }
}

/// Runs the command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
