//! `clickhd`: click-counting homodyne detection simulations from the
//! command line. Configure a state, a detection scheme, and imperfections in
//! JSON; emit CSV or JSON tables suitable for plotting.

mod commands;
mod config;
mod output;
mod presets;

use anyhow::Result;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

use config::{load_merged, RunConfig};
use output::{render, write_output, Format};

#[derive(Parser)]
#[command(name = "clickhd", version, about = "Homodyne detection with on-off detector arrays")]
struct Cli {
    /// JSON run configuration; merged over the command's defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    /// RNG seed for sampling commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Click and photoelectric statistics of the configured state.
    Stats,
    /// Criterion sweep over a phase (or APD-count) grid.
    Sweep,
    /// Monte Carlo click records of the configured scheme.
    Sample,
    /// Effective parameters of a spectral mode-mismatch setup.
    Mismatch,
    /// Variance criterion under thermal LO fluctuations.
    ThermalLo,
    /// Reproduce the data behind one published figure.
    Figure {
        /// Figure number: 2, 4, 5, 6, 7, 8, or 9.
        number: u8,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }

    let preset = match &cli.command {
        Command::Figure { number } => presets::figure_preset(*number)?,
        _ => RunConfig::default(),
    };
    let config = load_merged(preset, cli.config.as_deref())?;

    let table = match &cli.command {
        Command::Stats => commands::cmd_stats(&config)?,
        Command::Sweep => commands::cmd_sweep(&config)?,
        Command::Sample => commands::cmd_sample(&config, cli.seed)?,
        Command::Mismatch => commands::cmd_mismatch(&config)?,
        Command::ThermalLo => commands::cmd_thermal_lo(&config)?,
        Command::Figure { number } => commands::cmd_figure(*number, &config, cli.seed)?,
    };

    let text = render(&table, &config, cli.format)?;
    write_output(&text, cli.out.as_deref())
}
