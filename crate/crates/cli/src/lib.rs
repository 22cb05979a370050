//! Command-line experiment runner: resolves a configuration, runs one
//! experiment from `vqelab-core`, and writes CSV tables, SVG plots,
//! `config.json` and, last, `manifest.json`.

pub mod config;
mod error;
pub mod execute;
pub mod plot;
pub mod records;

use clap::{Parser, Subcommand};

pub use config::{parse_config, CommonArgs, Experiment, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use execute::{execute, RunManifest};

/// Environment variable capping the worker-thread count (0 = automatic).
pub const THREADS_ENV: &str = "VQELAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "vqelab",
    version,
    about = "Layered variational circuit experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gradient variance and norm statistics over random initializations.
    Bp(CommonArgs),
    /// Growth rate of the mean gradient norm with depth.
    Rate(CommonArgs),
    /// One VQE run with its trajectory.
    Vqe(CommonArgs),
    /// Independent VQE runs from different initializations.
    Ensemble(CommonArgs),
    /// Hessian at the optimum and projected trajectory distance.
    Landscape(CommonArgs),
    /// Minimum distance to random target states.
    Express(CommonArgs),
    /// Exact spectrum of the model Hamiltonian.
    Spectrum(CommonArgs),
    /// Scaling fit of Tr(H^2) over system sizes.
    Trh2fit(CommonArgs),
}

impl Command {
    pub fn split(&self) -> (Experiment, &CommonArgs) {
        match self {
            Command::Bp(a) => (Experiment::Bp, a),
            Command::Rate(a) => (Experiment::Rate, a),
            Command::Vqe(a) => (Experiment::Vqe, a),
            Command::Ensemble(a) => (Experiment::Ensemble, a),
            Command::Landscape(a) => (Experiment::Landscape, a),
            Command::Express(a) => (Experiment::Express, a),
            Command::Spectrum(a) => (Experiment::Spectrum, a),
            Command::Trh2fit(a) => (Experiment::Trh2fit, a),
        }
    }
}

/// Reads the thread cap from the environment.
pub fn thread_count_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))),
        },
    }
}

/// Parses the configuration for `command` and runs it.
pub fn run(command: &Command) -> CliResult<RunManifest> {
    let (experiment, args) = command.split();
    let config = parse_config(experiment, args)?;
    execute(&config)
}
