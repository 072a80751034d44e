//! Batch driver: `amphough <command> --config <path> [--out <dir>] [--seed <u64>] [--threads <n>]`.
//!
//! Commands:
//! - `synth` renders a synthetic scene to PGM with a `.truth` sidecar.
//! - `radon` writes the sinogram of an image as CSV and a heatmap.
//! - `correlate` writes the cross-correlation of an image and a template.
//! - `detect` sweeps the similarity group and writes the AMPH accumulator,
//!   probability slices and a detection report.
//! - `interfere` prints the single and joint intensities of two waves.

pub mod commands;
pub mod config;
pub mod error;
pub mod synth;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use commands::{Job, Outcome};
pub use config::JobConfig;
pub use error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Synth,
    Radon,
    Correlate,
    Detect,
    Interfere,
}

#[derive(Debug, Parser)]
#[command(name = "amphough", version, about = "Complex-amplitude Hough and Radon transforms")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Job configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn run(args: &Args) -> Result<Outcome> {
    let text = fs::read_to_string(&args.config).map_err(|source| CliError::Io {
        path: args.config.clone(),
        source,
    })?;
    let cfg = JobConfig::parse(&text)?;
    let job = Job {
        seed: commands::job_seed(&cfg, args.seed)?,
        cfg,
        base_dir: commands::base_dir(&args.config),
        out_dir: args.out.clone(),
    };
    let go = || match args.command {
        Command::Synth => commands::synth(&job),
        Command::Radon => commands::radon(&job),
        Command::Correlate => commands::correlate(&job),
        Command::Detect => commands::detect(&job),
        Command::Interfere => commands::interfere(&job),
    };
    match args.threads {
        None => go(),
        Some(0) => Err(CliError::Threads("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Threads(e.to_string()))?
            .install(go),
    }
}

/// Parses `argv` and runs it.
pub fn run_from<I, T>(argv: I) -> Result<Outcome, String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| e.to_string())?;
    run(&args).map_err(|e| e.to_string())
}
