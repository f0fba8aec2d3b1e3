//! Scenario-driven command-line front end.
//!
//! Subcommands mirror the offline pipeline: generate a scenario, optimize
//! on/off patterns, evaluate fronts with the system-level simulator, compare
//! against baseline heuristics, and study coverage versus transmit power.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cso_core::error::Error;
use cso_core::ScenarioConfig;

/// Exit codes: 0 success, 2 configuration or input-format error,
/// 3 infeasible scenario, 4 non-convergence.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Format { .. } | Error::Dimension(_) | Error::Empty(_) => 2,
        Error::Infeasible(_) | Error::VolumeUnreachable { .. } => 3,
        Error::NonConvergence { .. } => 4,
        Error::Io(_) => 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Moea,
    Mda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IciArg {
    Fl,
    Lc,
}

#[derive(Parser)]
#[command(name = "cso", version, about = "Cell switch-off optimization toolkit")]
struct Cli {
    /// Scenario configuration (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed overriding the per-block seeds in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the scenario and export the gain matrix, demand grid, and summary.
    Generate,
    /// Search on/off patterns and export the resulting front or chain.
    Optimize {
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Interference model; overrides the configured objective pair
        /// (lc forces power-dispersion, fl a full-load pair).
        #[arg(long, value_enum)]
        ici: Option<IciArg>,
        /// Also enumerate the exact front (guarded to at most 20 cells).
        #[arg(long)]
        exhaustive: bool,
    },
    /// Simulate every front member across demand volumes and select topologies.
    Evaluate {
        /// Front or chain CSV produced by `optimize`.
        #[arg(long)]
        front: PathBuf,
        /// Comma-separated demand volumes as fractions of the all-on capacity.
        #[arg(long)]
        volume_multipliers: Option<String>,
        #[arg(long, value_enum)]
        ici: Option<IciArg>,
    },
    /// Run the baseline heuristics and the proposed pipeline across volumes.
    Compare {
        #[arg(long)]
        volume_multipliers: Option<String>,
    },
    /// Coverage, detectable cells, and candidate servers versus transmit power.
    CoverageReport {
        /// Sweep as LO:HI:STEP in dBm.
        #[arg(long, default_value = "0:40:2", allow_hyphen_values = true)]
        power_sweep: String,
        /// Candidate-server window below the best server, dB.
        #[arg(long, default_value_t = 6.0)]
        candidate_window_db: f64,
    },
}

fn load_config(cli: &Cli) -> cso_core::error::Result<ScenarioConfig> {
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.channel.seed = seed;
        config.demand.seed = seed.wrapping_add(1);
        config.optimization.seed = seed.wrapping_add(2);
        config.simulation.seed = seed.wrapping_add(3);
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> cso_core::error::Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let config = load_config(cli)?;
    std::fs::create_dir_all(&cli.out)?;

    match &cli.command {
        Command::Generate => commands::generate(&config, &cli.out),
        Command::Optimize {
            algorithm,
            ici,
            exhaustive,
        } => commands::optimize(&config, &cli.out, *algorithm, *ici, *exhaustive),
        Command::Evaluate {
            front,
            volume_multipliers,
            ici,
        } => commands::evaluate(
            &config,
            &cli.out,
            front,
            volume_multipliers.as_deref(),
            *ici,
        ),
        Command::Compare { volume_multipliers } => {
            commands::compare(&config, &cli.out, volume_multipliers.as_deref())
        }
        Command::CoverageReport {
            power_sweep,
            candidate_window_db,
        } => commands::coverage_report(&config, &cli.out, power_sweep, *candidate_window_db),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
