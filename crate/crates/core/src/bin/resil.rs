use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use resil::harness::{emit_plot_script, run_scenario_file, PlotKind, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "resil", version, about = "Network robustness and resiliency experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSVs plus a manifest.
    Run {
        scenario: PathBuf,
        /// Override the scenario's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Parse and validate a scenario file without running it.
    Validate { scenario: PathBuf },
    /// Write a matplotlib script for a result CSV.
    Plot {
        csv: PathBuf,
        /// percolation | beta | trace | interdependent | buffering
        #[arg(long)]
        kind: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { scenario, seed, out, jobs } => {
            match run_scenario_file(&scenario, &RunOptions { seed, out_dir: out, jobs }) {
                Ok(report) => {
                    for p in report.outputs.iter().chain([&report.manifest]) {
                        println!("{}", p.display());
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Validate { scenario } => match Scenario::from_file(&scenario) {
            Ok(s) => {
                println!("ok: {} ({} replicates, seed {})", s.experiment.name(), s.replicates, s.seed);
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Command::Plot { csv, kind } => match kind.parse::<PlotKind>().and_then(|k| emit_plot_script(&csv, k)) {
            Ok(path) => {
                println!("{}", path.display());
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                if matches!(e, resil::Error::Io(_)) { 1 } else { 3 }
            }
        },
    };
    ExitCode::from(code as u8)
}
