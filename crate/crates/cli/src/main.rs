use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shelfmem::config::CONFIG_ENV;
use shelfmem::planner::Method;

mod commands;

use commands::Failure;

/// Evidential shelf mapping: generate scenes, run planners, compare methods
/// and replay episode logs.
#[derive(Parser)]
#[command(name = "shelfmem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one canonical scene file per configured seed.
    Generate(Common),
    /// Run one method over the configured scenes.
    Run {
        #[command(flatten)]
        common: Common,
        /// Method to run; defaults to the first configured method.
        #[arg(long)]
        method: Option<Method>,
        /// Read scenes from this directory instead of generating them.
        #[arg(long)]
        scenes: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run every configured method on the same scenes and write a report.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Methods to compare, overriding the config (repeatable).
        #[arg(long)]
        method: Vec<Method>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Re-execute logged episodes and check every step.
    Replay {
        /// Log files or directories of `.jsonl` logs.
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        /// Scene file the logs must have been recorded on.
        #[arg(long)]
        scene: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config; falls back to the SHELFMEM_CONFIG variable, then
    /// to built-in defaults.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Added to every scene seed.
    #[arg(long, default_value_t = 0)]
    seed_offset: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(c) => commands::load(&c).and_then(|cfg| commands::generate(&cfg)),
        Command::Run {
            common,
            method,
            scenes,
            workers,
        } => commands::load(&common)
            .and_then(|cfg| commands::run(&cfg, method, scenes.as_deref(), workers)),
        Command::Compare {
            common,
            method,
            workers,
        } => commands::load(&common).and_then(|cfg| commands::compare(cfg, method, workers)),
        Command::Replay { logs, scene } => commands::replay(&logs, scene.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) | Failure::Run(m) | Failure::Replay(m) => f.write_str(m),
        }
    }
}
