//! `segsurp`: train subword-scheme n-gram language models and evaluate
//! surprisal as a reading-time predictor.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "segsurp",
    version,
    about = "N-gram language models over subword token streams, word surprisal, and reading-time regressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one Kneser-Ney model per scheme and write ARPA files plus a manifest.
    Train {
        /// Run configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated subset of schemes to run.
        #[arg(long)]
        schemes: Option<String>,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute surprisals, fit the regressions, and write report.json plus figure CSVs.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        schemes: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory holding trained models (defaults to the output directory).
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Print side-by-side tokenizations of a text, one row per scheme.
    Tokenize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        schemes: Option<String>,
        /// Input text, one sentence per line.
        #[arg(long)]
        input: PathBuf,
    },
    /// Render a report.json as readable tables.
    Report {
        /// Path to report.json or the directory containing it.
        #[arg(long)]
        report: PathBuf,
    },
}

fn main() -> Result<()> {
    // Die quietly when a pager closes the pipe instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Train {
            config,
            schemes,
            seed,
            out,
        } => {
            let config = RunConfig::load(config)?.with_overrides(schemes.as_deref(), seed, out)?;
            commands::cmd_train(&config)
        }
        Command::Evaluate {
            config,
            schemes,
            seed,
            out,
            models,
        } => {
            let config = RunConfig::load(config)?.with_overrides(schemes.as_deref(), seed, out)?;
            commands::cmd_evaluate(&config, models)
        }
        Command::Tokenize {
            config,
            schemes,
            input,
        } => {
            let config = RunConfig::load(config)?.with_overrides(schemes.as_deref(), None, None)?;
            commands::cmd_tokenize(&config, &input)
        }
        Command::Report { report } => commands::cmd_report(&report),
    }
}
