use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nbmf_cli::config::{
    resolve_benchmark, resolve_calibrate, resolve_factorize, resolve_generate, CommonArgs,
};
use nbmf_cli::{cmd_benchmark, cmd_calibrate, cmd_factorize, cmd_generate, CliResult};

/// Nonnegative/binary matrix factorization with simulated forward and
/// reverse annealing.
#[derive(Parser)]
#[command(name = "nbmf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor an input matrix and write history, checkpoint, and factors
    Factorize {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scan reversal distance and hold time over a harvested QUBO corpus
    Calibrate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also dump each corpus QUBO as JSON under out/qubos/
        #[arg(long)]
        dump_qubos: bool,
    },
    /// Race reverse annealing against tabu search (time to target)
    Benchmark {
        #[command(flatten)]
        common: CommonArgs,
        /// Wall-clock budget per QUBO for the competitor, in µs
        #[arg(long)]
        tabu_max_time_us: Option<u64>,
        /// Number of QUBOs to harvest
        #[arg(long)]
        corpus_size: Option<usize>,
        /// Also dump each corpus QUBO as JSON under out/qubos/
        #[arg(long)]
        dump_qubos: bool,
    },
    /// Generate a planted synthetic instance
    Generate {
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        rank: Option<usize>,
        /// Additive Gaussian noise level (truncated at zero)
        #[arg(long)]
        noise_sigma: Option<f64>,
        /// Bernoulli density of the planted binary factor
        #[arg(long)]
        density: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output encoding: csv or binary
        #[arg(long)]
        format: Option<String>,
        /// JSON config file; flags override its values
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Factorize { common } => {
            let settings = resolve_factorize(&common)?;
            cmd_factorize(&settings)?;
        }
        Command::Calibrate { common, dump_qubos } => {
            let settings = resolve_calibrate(&common, dump_qubos)?;
            cmd_calibrate(&settings)?;
        }
        Command::Benchmark {
            common,
            tabu_max_time_us,
            corpus_size,
            dump_qubos,
        } => {
            let settings = resolve_benchmark(&common, tabu_max_time_us, corpus_size, dump_qubos)?;
            cmd_benchmark(&settings)?;
        }
        Command::Generate {
            rows,
            cols,
            rank,
            noise_sigma,
            density,
            seed,
            out,
            format,
            config,
        } => {
            let settings = resolve_generate(
                rows,
                cols,
                rank,
                noise_sigma,
                density,
                seed,
                out,
                format,
                config.as_deref(),
            )?;
            cmd_generate(&settings)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
