use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use doeblin_occupancy::commands::{self, OccupancyMode};
use doeblin_occupancy::config::ChainSpec;
use doeblin_occupancy::error::Result;

/// Exact and approximate occupancy distributions of finite Markov chains
/// via Doeblin's ergodicity coefficient.
#[derive(Parser)]
#[command(name = "doeblin-occupancy", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Chain configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the memory-breaker split alpha, e, M of the kernel.
    Decompose {
        #[command(flatten)]
        common: Common,
    },
    /// Emit per-power mixture parameters (alpha_k, m_k, n_k, c_k).
    PowerPlan {
        #[command(flatten)]
        common: Common,
        /// Largest power to evaluate.
        #[arg(long, default_value_t = 7)]
        k_max: u64,
        /// Accuracy target in total variation.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Emit the stationary distribution by both methods plus a convergence
    /// trace.
    Stationary {
        #[command(flatten)]
        common: Common,
    },
    /// Emit an occupancy distribution (count, probability).
    Occupancy {
        #[command(flatten)]
        common: Common,
        /// exact | doeblin | normal | polya-aeppli
        #[arg(long, default_value = "exact")]
        mode: OccupancyMode,
        /// Piece cap for the doeblin mode.
        #[arg(long)]
        m: Option<u64>,
        /// Cap-rule constant (> 1) when no explicit cap is given.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Evaluate the full (n, beta) approximation grid against the exact law.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Sample the coin-toss construction against the chain itself.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Seed for the ChaCha8 generator.
        #[arg(long)]
        seed: Option<u64>,
        /// Run cap for the longest-run cross-check.
        #[arg(long)]
        m: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<()> {
    let (common, csv, note) = match cli.command {
        Command::Decompose { common } => {
            let spec = ChainSpec::load(&common.config)?;
            (common, commands::decompose(&spec)?, None)
        }
        Command::PowerPlan {
            common,
            k_max,
            epsilon,
        } => {
            let spec = ChainSpec::load(&common.config)?;
            (common, commands::plan(&spec, k_max, epsilon)?, None)
        }
        Command::Stationary { common } => {
            let spec = ChainSpec::load(&common.config)?;
            (common, commands::stationary(&spec)?, None)
        }
        Command::Occupancy { common, mode, m, c } => {
            let spec = ChainSpec::load(&common.config)?;
            let (csv, note) = commands::occupancy(&spec, mode, m, c)?;
            (common, csv, note)
        }
        Command::Compare { common, m, c } => {
            let spec = ChainSpec::load(&common.config)?;
            (common, commands::compare(&spec, m, c)?, None)
        }
        Command::Simulate { common, seed, m } => {
            let spec = ChainSpec::load(&common.config)?;
            (common, commands::simulate(&spec, seed, m)?, None)
        }
    };
    if let Some(note) = note {
        eprintln!("{note}");
    }
    match common.out {
        Some(path) => std::fs::write(path, csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
