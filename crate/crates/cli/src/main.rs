//! `spotfou` command-line front end.
//!
//! ```bash
//! spotfou simulate --h 0.7 --gamma 0.05 --beta 0.08 --days 730 --seed 1 --output-dir out/sim
//! spotfou decompose --input prices.csv --output-dir out/dec
//! spotfou backtest --input prices.csv --variant fbm,sbm,naive --horizons 1-30 --paths 1000
//! spotfou evaluate --input out/forecasts.json --output-dir out/eval
//! ```

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunFile;
use error::CliError;

#[derive(Parser)]
#[command(name = "spotfou", version, about = "Spot electricity prices: fOU base plus Hawkes spikes")]
struct Cli {
    /// Flat key = value run file; keys are long flag names, flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed for every random draw
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// error, warn, info, debug or trace
    #[arg(long, global = true)]
    log_level: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate X1, X2 and the jump intensity on a daily grid
    Simulate(SimulateArgs),
    /// Split a price series into seasonal, trend, jump and base parts
    Decompose(DecomposeArgs),
    /// Rolling-window calibration and distributional forecasts
    Backtest(BacktestArgs),
    /// Score a forecasts.json written by `backtest`
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Hurst exponent
    #[arg(long = "h")]
    pub hurst: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Background jump intensity
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// GEV location of the jump sizes
    #[arg(long)]
    pub mu: Option<f64>,
    /// GEV scale of the jump sizes
    #[arg(long)]
    pub gev_sigma: Option<f64>,
    /// GEV shape of the jump sizes
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub days: Option<usize>,
}

#[derive(Args, Clone)]
pub struct FilterArgs {
    /// Wavelet level of the long-term trend
    #[arg(long)]
    pub level: Option<usize>,
    /// Daily decay of the median-reversion prolongation
    #[arg(long)]
    pub theta: Option<f64>,
    /// Days of trend prolongation
    #[arg(long)]
    pub extension: Option<usize>,
    /// Spike threshold in units of the increment standard deviation
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub ma_window: Option<usize>,
    /// Repeat spike detection until no new spikes appear
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub iterate_spikes: Option<bool>,
    /// jumps-first or trend-first
    #[arg(long)]
    pub order: Option<String>,
}

#[derive(Args)]
pub struct DecomposeArgs {
    /// CSV of date,price rows
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// File of extra holiday dates, one YYYY-MM-DD per line (replaces the built-in calendar)
    #[arg(long)]
    pub holidays: Option<PathBuf>,
    #[command(flatten)]
    pub filter: FilterArgs,
}

#[derive(Args)]
pub struct BacktestArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub holidays: Option<PathBuf>,
    /// Comma list of fbm, sbm, naive
    #[arg(long)]
    pub variant: Option<String>,
    /// Horizons such as 1-30 or 1,7,30
    #[arg(long)]
    pub horizons: Option<String>,
    /// Monte-Carlo paths per forecast
    #[arg(long)]
    pub paths: Option<usize>,
    /// Calibration window length in days
    #[arg(long)]
    pub window: Option<usize>,
    /// Pin the fbm Hurst exponent instead of estimating it
    #[arg(long)]
    pub pin_hurst: Option<f64>,
    #[command(flatten)]
    pub filter: FilterArgs,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// forecasts.json from a backtest run
    #[arg(long)]
    pub input: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let run = match &cli.config {
        Some(path) => RunFile::load(path)?,
        None => RunFile::default(),
    };
    let level = run.pick(cli.log_level, "log-level")?.unwrap_or_else(|| "warn".into());
    env_logger::Builder::new()
        .parse_filters(&level)
        .format_timestamp(None)
        .try_init()
        .ok();
    if let Some(n) = run.pick(cli.threads, "threads")? {
        if n == 0 {
            return Err(CliError::Param("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Param(format!("thread pool: {e}")))?;
    }
    let common = commands::Common {
        seed: run.pick_or(cli.seed, "seed", 0)?,
        output_dir: run.pick_or(cli.output_dir, "output-dir", PathBuf::from("."))?,
        run,
    };
    match cli.command {
        Command::Simulate(a) => commands::simulate(a, &common),
        Command::Decompose(a) => commands::decompose_cmd(a, &common),
        Command::Backtest(a) => commands::backtest(a, &common),
        Command::Evaluate(a) => commands::evaluate(a, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spotfou: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
