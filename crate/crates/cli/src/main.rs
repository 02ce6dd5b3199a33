use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Long-range hybrid Clifford circuits: sweeps and scaling analyses.
#[derive(Parser, Debug)]
#[command(name = "lrmipt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a sweep plan and write one CSV per cell plus a manifest.
    Simulate(Common),
    /// Fit a finite-size scaling collapse, optionally with bootstrap intervals.
    Collapse(Common),
    /// Fit S = A L^mu to half-chain entropies.
    Powerfit(Common),
    /// Tabulate single-layer crossing counts and their exponents.
    Crossings(Common),
    /// Second Renyi entropy profiles of the effective Ising model.
    HeffScan(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides the config file).
    #[arg(long, env = "LRMIPT_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Master seed; ignored by deterministic commands.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(c) => commands::simulate(c),
        Command::Collapse(c) => commands::collapse(c),
        Command::Powerfit(c) => commands::powerfit(c),
        Command::Crossings(c) => commands::crossings(c),
        Command::HeffScan(c) => commands::heff_scan(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
