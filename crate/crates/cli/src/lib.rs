//! Command-line front end: ingestion, rolling VaR estimation, backtests,
//! plot data export and synthetic data generation.

pub mod commands;
pub mod config;
pub mod error;
pub mod files;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::simulate::SimulateArgs;
pub use config::{CommonArgs, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "varscale", version, about = "Rolling Value-at-Risk with direct and square-root-of-time scaled horizons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptive statistics, Jarque-Bera and zero-mean t-tests per dataset.
    Stats(CommonArgs),
    /// Rolling VaR forecasts for every dataset, method, mode and confidence.
    Var(CommonArgs),
    /// Coverage backtests of previously written forecasts.
    Backtest {
        #[command(flatten)]
        common: CommonArgs,
        /// Directory holding the forecast files (defaults to --out).
        #[arg(long)]
        forecasts: Option<PathBuf>,
    },
    /// Realized returns next to direct and scaled VaR for plotting.
    Plotdata {
        #[command(flatten)]
        common: CommonArgs,
        /// Directory holding the forecast files (defaults to --out).
        #[arg(long)]
        forecasts: Option<PathBuf>,
    },
    /// Seeded synthetic returns and prices.
    Simulate(SimulateArgs),
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Stats(args) => commands::stats::run(&RunConfig::resolve(&args)?),
        Command::Var(args) => commands::var::run(&RunConfig::resolve(&args)?),
        Command::Backtest { common, forecasts } => {
            let cfg = RunConfig::resolve(&common)?;
            let dir = forecasts.unwrap_or_else(|| cfg.out.clone());
            commands::backtest::run(&cfg, &dir)
        }
        Command::Plotdata { common, forecasts } => {
            let cfg = RunConfig::resolve(&common)?;
            let dir = forecasts.unwrap_or_else(|| cfg.out.clone());
            commands::plotdata::run(&cfg, &dir)
        }
        Command::Simulate(args) => commands::simulate::run(&args),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
