//! `oc2`: run the orbital construction studies from the command line.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use oc2_core::io::{execute, ExperimentConfig, EXPERIMENTS};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "oc2", version, about = "Orbital construction swarm simulator and experiment harness")]
struct Cli {
    /// TOML configuration; missing keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed (overrides `seed` in the config).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output root; each experiment writes into `<DIR>/<experiment>/`.
    #[arg(long, global = true, value_name = "DIR", env = "OC2_OUT", default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Dump a frame every N steps in `run` (0 = off; overrides `run.frames_every`).
    #[arg(long, global = true, value_name = "N")]
    frames_every: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single trial: proportion series, final frame, optional frame dumps.
    Run,
    /// Robot-count sweep with 95% confidence intervals.
    Sweep,
    /// Scatter all pucks mid-trial and measure the recovery.
    Perturb,
    /// Puck-sensing radius ablation on the L shape.
    Ablate,
    /// Exhaustive search over both controller masks.
    Search,
    /// Flow field of a lone robot and its circulation.
    Flow,
    /// Print the fully resolved configuration as TOML.
    Config,
    /// List the registered experiments.
    List,
}

impl Command {
    fn experiment(&self) -> Option<&'static str> {
        match self {
            Command::Run => Some("run"),
            Command::Sweep => Some("sweep"),
            Command::Perturb => Some("perturb"),
            Command::Ablate => Some("ablate"),
            Command::Search => Some("search"),
            Command::Flow => Some("flow"),
            Command::Config | Command::List => None,
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.frames_every {
        config.run.frames_every = n;
    }
    config.validate()?;
    Ok(config)
}

fn real_main(cli: Cli) -> Result<()> {
    let config = resolve_config(&cli)?;
    let Some(name) = cli.command.experiment() else {
        match cli.command {
            Command::Config => print!("{}", config.to_toml()?),
            _ => {
                for e in EXPERIMENTS {
                    println!("{:<8} {}", e.name(), e.summary());
                }
            }
        }
        return Ok(());
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        anyhow::ensure!(n >= 1, "--threads must be >= 1");
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("building the worker pool")?;
    let manifest = pool
        .install(|| execute(name, &config, &cli.out))
        .with_context(|| format!("experiment `{name}` failed"))?;
    let dir = cli.out.join(name);
    eprintln!("{name}: wrote {} artifacts to {}", manifest.artifacts.len(), dir.display());
    for (key, value) in &manifest.notes {
        eprintln!("  {key} = {value}");
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
