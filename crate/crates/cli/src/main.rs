use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mimojam_cli::{execute, ExperimentConfig, Mode};

#[derive(Parser)]
#[command(version, about = "Jamming simulations for a two-link MIMO system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the master seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the CSV tables.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// BER/PER sweep over schemes, energies and pilot lengths.
    Sweep(RunArgs),
    /// Evaluate the jamming-efficiency predicates, optionally against simulation.
    Theorems(RunArgs),
    /// Paired learning runs with enhanced and semi-uniform exploration.
    Learn(RunArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (mode, args) = match cli.command {
        Command::Sweep(a) => (Mode::BerSweep, a),
        Command::Theorems(a) => (Mode::TheoremCheck, a),
        Command::Learn(a) => (Mode::Learning, a),
    };
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if cfg.mode != mode {
        anyhow::bail!(
            "config {} has mode {}, but this subcommand runs {}",
            args.config.display(),
            cfg.mode.name(),
            mode.name()
        );
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let files = execute(&cfg, &args.out, args.threads)?;
    eprintln!("config hash {}", cfg.hash());
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
