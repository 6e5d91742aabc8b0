//! `diracwell`: runs, scans, and analyses for vacuum pair creation in a
//! chirped Sauter well.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Overrides, RunConfig};

/// Invalid user input; exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Parser)]
#[command(name = "diracwell", version, about = "Pair creation in combined static and chirped Sauter wells")]
struct Cli {
    /// JSON config file (a previous run's meta.json also works)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads
    #[arg(long, global = true, env = "DIRACWELL_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve one pulse; writes number_vs_time.csv, spectrum.csv, density.csv, meta.json
    Evolve {
        #[command(flatten)]
        overrides: Overrides,
        /// Spectrum bin width [c²]
        #[arg(long)]
        bin_width: Option<f64>,
    },
    /// Scan ω0 and/or b; writes scan.csv and an append-only checkpoint.jsonl
    Scan {
        #[command(flatten)]
        overrides: Overrides,
        /// ω0 values as START:STEP:COUNT [c²]
        #[arg(long, allow_hyphen_values = true)]
        omega0_scan: Option<String>,
        /// b values as START:STEP:COUNT [c²/t1]
        #[arg(long, allow_hyphen_values = true)]
        b_scan: Option<String>,
        /// Discard an existing checkpoint instead of resuming
        #[arg(long)]
        restart: bool,
    },
    /// Bound levels of the static well; prints a table and writes bound_states.csv
    BoundStates {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Frequency content of the chirped oscillation; writes pulse_spectrum.csv
    PulseSpectrum {
        #[command(flatten)]
        overrides: Overrides,
        /// Samples over t1 (power of two, at least 1024)
        #[arg(long)]
        samples: Option<usize>,
        /// Apply a Hann window
        #[arg(long)]
        hann: bool,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    if let Some(e) = err.downcast_ref::<diracwell_core::Error>() {
        return if e.is_config_error() { 2 } else { 3 };
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError(format!("thread pool: {e}")))?;
    }
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Evolve { overrides, bin_width } => {
            overrides.apply(&mut cfg)?;
            if let Some(w) = bin_width {
                cfg.spectrum_bin_width_c2 = w;
            }
            commands::evolve(&cfg)
        }
        Command::Scan {
            overrides,
            omega0_scan,
            b_scan,
            restart,
        } => {
            overrides.apply(&mut cfg)?;
            commands::scan(&mut cfg, omega0_scan.as_deref(), b_scan.as_deref(), restart)
        }
        Command::BoundStates { overrides } => {
            overrides.apply(&mut cfg)?;
            commands::bound_states(&cfg)
        }
        Command::PulseSpectrum {
            overrides,
            samples,
            hann,
        } => {
            overrides.apply(&mut cfg)?;
            if let Some(n) = samples {
                cfg.pulse_samples = n;
            }
            if hann {
                cfg.pulse_window = diracwell_core::Window::Hann;
            }
            commands::pulse_spectrum(&cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
