use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hopspin::{execute, Command};

#[derive(Parser)]
#[command(
    name = "hopspin",
    version,
    about = "Mobile spin hopping between two static spins"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Evolve the configured initial state and tabulate every observable.
    Simulate(RunArgs),
    /// Exact-vs-effective deviation for each η/J in `run.ratios`.
    Compare(RunArgs),
    /// Closed-form doublet probabilities on the configured grid.
    Analytic(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    config: PathBuf,
    /// CSV destination; overrides `output.path`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Compare(a) => (Command::Compare, a),
        Sub::Analytic(a) => (Command::Analytic, a),
    };
    match execute(command, &args.config, args.out.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
