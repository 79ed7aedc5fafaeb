use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use netgini::cli::{self, CliError, SuiteOptions};
use netgini::GraphFormat;

#[derive(Parser)]
#[command(name = "netgini", version, about = "Prisoner's Dilemma transactions on networks, tracked by Gini coefficient")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a sweep of networks, groups, bank settings and replicates.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed override.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Plot one or more gini_series CSVs into a single SVG.
    Plot {
        #[arg(required = true)]
        series: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Normalize a network file and dump it as an edge list.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "snap")]
        format: GraphFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn execute(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Run { config, out, seed } => {
            let result = cli::cmd_run(&config, out.as_deref(), seed)?;
            println!(
                "final_gini={:.6} iterations={} converged_at={}",
                result.final_gini(),
                result.iterations_executed(),
                result.converged_at.map_or_else(|| "none".into(), |k| k.to_string())
            );
        }
        Command::Suite {
            config,
            out,
            seed,
            workers,
            replicates,
        } => {
            let opts = SuiteOptions {
                out: out.as_deref(),
                seed,
                workers,
                replicates,
            };
            let report = cli::cmd_suite(&config, &opts)?;
            println!("{} runs, {} failed", report.rows.len(), report.failures());
        }
        Command::Plot { series, out } => cli::cmd_plot(&series, &out)?,
        Command::Convert { input, format, out } => {
            let (nodes, edges) = cli::cmd_convert(&input, format, &out)?;
            println!("nodes={nodes} edges={edges}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
