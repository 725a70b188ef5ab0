use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spoofrelay::cli;
use spoofrelay::oracle::GridSize;
use spoofrelay::verify::VerifyConfig;

#[derive(Parser)]
#[command(
    name = "spoofrelay",
    version,
    about = "Spoofing-relay eavesdropping: optimal attack and leakage"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario (direct gains or collinear geometry file).
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// Also write the machine-readable record here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the eavesdropper position and write the leakage CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the closed forms against the grid and Monte-Carlo oracles.
    Verify {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        scenarios: u64,
        /// Oracle grid as n_rho,n_mag,n_phase.
        #[arg(long, default_value = "256,256,64")]
        grid: GridSize,
        /// Write counterexamples as JSON to this path.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Solve { scenario, out } => {
            cli::cmd_solve(&scenario, out.as_deref()).map(|t| (t, true))
        }
        Command::Sweep { config, out } => cli::cmd_sweep(&config, &out).map(|t| (t, true)),
        Command::Verify {
            seed,
            scenarios,
            grid,
            dump,
        } => {
            let cfg = VerifyConfig {
                seed,
                n_scenarios: scenarios as usize,
                grid,
                ..VerifyConfig::default()
            };
            cli::cmd_verify(&cfg, dump.as_deref())
        }
    };
    match result {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
