//! `schursim` command-line front end.

mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{bench, blocks, shadows, sweep, verify};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "schursim", version, about = "Block simulation of permutation-equivariant qubit circuits")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "SCHURSIM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the irrep blocks of a generator or symmetrized Pauli as JSON.
    Blocks(blocks::BlocksArgs),
    /// Sweep LMG adiabatic runs and write order parameter and concurrence as CSV.
    LmgSweep(sweep::SweepArgs),
    /// Time pipeline stages and fit scaling exponents.
    Bench(bench::BenchArgs),
    /// Simulate classical-shadow estimation.
    Shadows(shadows::ShadowsArgs),
    /// Run the invariant suite against the dense oracle.
    Verify(verify::VerifyArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(error::config("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| error::config(e.to_string()))?;
    }
    match cli.command {
        Command::Blocks(a) => blocks::run(a),
        Command::LmgSweep(a) => sweep::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Shadows(a) => shadows::run(a),
        Command::Verify(a) => verify::run(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("schursim: {e}");
            let code: ExitCode = e.exit_code();
            if let CliError::Io(ref io) = e {
                if io.kind() == std::io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
            }
            code
        }
    }
}
