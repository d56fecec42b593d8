//! `sadam` — seeded non-smooth optimization experiments from declarative
//! TOML configs.
//!
//! Exit codes: 0 on success (failed runs are recorded results, not
//! errors), 2 for configuration problems, 3 for I/O problems.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use config::CliDocument;
use error::CliResult;
use output::OutputDir;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sadam", version, about = "Non-smooth optimization experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the `[experiment]` section, one output pair per seed.
    Run {
        config: PathBuf,
        /// Replace the config's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides config and SADAM_OUT_DIR).
        #[arg(long)]
        out: Option<String>,
        /// Overwrite outputs even if their config hash differs.
        #[arg(long)]
        force: bool,
    },
    /// Run the `[experiment]` under each optimizer in `[compare.optimizers]`.
    Compare {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        force: bool,
    },
    /// Scan the instability score over the `[probe]` grid.
    Probe {
        config: PathBuf,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        force: bool,
    },
    /// Tabulate probe estimation error against probe count.
    Concentration {
        config: PathBuf,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        force: bool,
    },
    /// One-sample-swap stability comparison of S-Adam against AdamW.
    Stability {
        config: PathBuf,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        force: bool,
    },
    /// Print the compiled-in default hyperparameters as TOML.
    Defaults,
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            force,
        } => {
            let doc = CliDocument::load(&config)?;
            let out = OutputDir::resolve(out.as_deref(), doc.output.dir.as_deref(), force)?;
            commands::cmd_run(&doc, seed, &out)
        }
        Command::Compare {
            config,
            seed,
            out,
            force,
        } => {
            let doc = CliDocument::load(&config)?;
            let out = OutputDir::resolve(out.as_deref(), doc.output.dir.as_deref(), force)?;
            commands::cmd_compare(&doc, seed, &out)
        }
        Command::Probe { config, out, force } => {
            let doc = CliDocument::load(&config)?;
            let out = OutputDir::resolve(out.as_deref(), doc.output.dir.as_deref(), force)?;
            commands::cmd_probe(&doc, &out)
        }
        Command::Concentration { config, out, force } => {
            let doc = CliDocument::load(&config)?;
            let out = OutputDir::resolve(out.as_deref(), doc.output.dir.as_deref(), force)?;
            commands::cmd_concentration(&doc, &out)
        }
        Command::Stability { config, out, force } => {
            let doc = CliDocument::load(&config)?;
            let out = OutputDir::resolve(out.as_deref(), doc.output.dir.as_deref(), force)?;
            commands::cmd_stability(&doc, &out)
        }
        Command::Defaults => commands::cmd_defaults(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
