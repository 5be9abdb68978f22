// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line scenario runner for `spinbath`.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;
pub mod sweep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::ScenarioConfig;
pub use error::{CliError, Result};
pub use scenario::{Outcome, RunOptions};

#[derive(Debug, Parser)]
#[command(
    name = "spinbath",
    version,
    about = "Spin ensembles coupled to bosonic reservoirs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write every output selected in the scenario.
    Run(CommandArgs),
    /// Write the rates report only.
    Rates(CommandArgs),
    /// Compare against the exactly solvable pure-dephasing model.
    Verify(CommandArgs),
    /// Run the scenario once per value of the `[sweep]` parameter.
    Sweep(CommandArgs),
}

#[derive(Debug, Args)]
pub struct CommandArgs {
    /// Scenario file (TOML).
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Exit with status 2 if a validity condition fails.
    #[arg(long)]
    pub strict: bool,
    /// Pass bound on the oracle deviation for `verify`.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Overrides `grid.num_points`.
    #[arg(long)]
    pub grid_points: Option<usize>,
}

impl CommandArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            strict: self.strict,
            tolerance: self.tolerance,
            grid_points: self.grid_points,
        }
    }
}

type Handler = fn(&ScenarioConfig, &std::path::Path, &RunOptions) -> Result<Outcome>;

pub fn execute(cli: &Cli) -> Result<Vec<Outcome>> {
    let (args, f): (&CommandArgs, Handler) = match &cli.command {
        Command::Run(a) => (a, scenario::run),
        Command::Rates(a) => (a, scenario::rates),
        Command::Verify(a) => (a, scenario::verify),
        Command::Sweep(a) => {
            let cfg = ScenarioConfig::load(&a.config)?;
            return sweep::sweep(&cfg, &a.out_dir, &a.options());
        }
    };
    if !(args.tolerance.is_finite() && args.tolerance > 0.0) {
        return Err(CliError::config(
            "--tolerance",
            format!("must be positive, got {}", args.tolerance),
        ));
    }
    let cfg = ScenarioConfig::load(&args.config)?;
    Ok(vec![f(&cfg, &args.out_dir, &args.options())?])
}

/// Runs the parsed command, reporting to stdout and stderr; returns the exit status.
pub fn main_with(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(outcomes) => {
            for o in &outcomes {
                for w in &o.warnings {
                    eprintln!("warning: {w}");
                }
                for f in &o.files {
                    println!("wrote {}", f.display());
                }
                if let Some(d) = o.oracle_deviation {
                    println!("max oracle deviation {d:.3e}");
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
