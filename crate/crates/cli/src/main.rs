//! CLI driver: reproduces the model's payoff tables and figure data, runs
//! population simulations, and batches policy scenarios.
//!
//! Exit codes: 0 success, 1 validation error, 2 runtime degenerate case
//! (diverged/all-quit simulation, degenerate diversion pool).

mod commands;
mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use commands::{cmd_figure1, cmd_figure2, cmd_game, cmd_policy, cmd_simulate, cmd_validate, echo_config};
use config::RunConfig;
use emit::{Emitter, Format};

#[derive(Parser)]
#[command(name = "edurace", version, about = "Positional education competition model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the RNG seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Output formats (comma separated).
    #[arg(long, global = true, value_delimiter = ',', default_values = ["csv", "jsonl", "md"])]
    format: Vec<Format>,

    /// Worker limit for scenario batches.
    #[arg(long, global = true, default_value_t = 4)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Build the 2x2 obey/disobey game, dominance report, and dynamics trace.
    Game,
    /// Utility curves and argmax rows for a list of cutoffs.
    Figure1,
    /// Implied cutoffs and utility curves across score dispersions.
    Figure2,
    /// Run the threshold feedback simulation.
    Simulate,
    /// Run a batch of policy scenarios and compare them.
    Policy,
    /// Parse and validate a config file.
    ValidateConfig,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("--config is required"))?;
    let mut cfg = RunConfig::from_path(path)?;
    // Seed precedence: --seed, then top-level seed, then the population
    // block's own seed.
    let seed = cli.seed.or(cfg.seed);
    if let Some(seed) = seed {
        cfg.seed = Some(seed);
        if let Some(sim) = &mut cfg.simulate {
            sim.population.seed = seed;
        }
        if let Some(pol) = &mut cfg.policy {
            pol.population.seed = seed;
        }
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli)?;
    if matches!(cli.command, Command::ValidateConfig) {
        return cmd_validate(&cfg);
    }

    let emitter = Emitter::new(&cli.out, &cli.format)?;
    echo_config(&emitter, &cfg)?;
    match &cli.command {
        Command::Game => match &cfg.game {
            Some(g) => cmd_game(g, &emitter),
            None => bail!("config has no [game] section"),
        },
        Command::Figure1 => match &cfg.figure1 {
            Some(f) => cmd_figure1(f, &emitter),
            None => bail!("config has no [figure1] section"),
        },
        Command::Figure2 => match &cfg.figure2 {
            Some(f) => cmd_figure2(f, &emitter),
            None => bail!("config has no [figure2] section"),
        },
        Command::Simulate => match &cfg.simulate {
            Some(s) => cmd_simulate(s, &emitter),
            None => bail!("config has no [simulate] section"),
        },
        Command::Policy => match &cfg.policy {
            Some(p) => cmd_policy(p, &emitter, cli.workers),
            None => bail!("config has no [policy] section"),
        },
        Command::ValidateConfig => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
