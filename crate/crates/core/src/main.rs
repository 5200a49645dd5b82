use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dicke_herald::cli::{execute, Command};
use dicke_herald::config::Overrides;
use dicke_herald::Engine;

/// Heralded Dicke-state simulator. Thread count follows RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "dicke-herald", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the ideal protocol and dump the heralded state.
    Simulate(Common),
    /// Monte Carlo fidelity under geometric perturbations.
    Montecarlo(Common),
    /// Monte Carlo runs along one parameter axis.
    Scan(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, value_enum)]
    engine: Option<Engine>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Montecarlo(a) => (Command::MonteCarlo, a),
        Cmd::Scan(a) => (Command::Scan, a),
    };
    let overrides = Overrides { seed: args.seed, samples: args.samples, engine: args.engine, out: args.out };
    ExitCode::from(execute(command, &args.config, &overrides) as u8)
}
