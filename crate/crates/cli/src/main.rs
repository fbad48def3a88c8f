//! `armvalue`: run values and posterior ratings for catcher and outfielder arms.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Role;

#[derive(Debug, Parser)]
#[command(name = "armvalue", version, about = "Rate catcher and outfielder arms in runs saved")]
pub struct Cli {
    /// TOML run configuration; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master random seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Fielding role of the input data
    #[arg(long, global = true, value_enum)]
    pub role: Option<Role>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count opportunities and outcomes per player, season and situation
    Tabulate(TabulateArgs),
    /// Compute per player-season run values
    Evaluate(EvaluateArgs),
    /// Fit the hierarchical model and write posterior draws
    Fit(FitArgs),
    /// Summarize posterior draws
    Report(ReportArgs),
    /// Generate synthetic opportunity and run-value files
    Simulate(SimulateArgs),
    /// Evaluate, fit and report in one go
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    /// Opportunity CSV
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct TableArgs {
    /// Expected runs matrix CSV (built-in reference when omitted)
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Transition table CSV for the role (built-in when omitted)
    #[arg(long)]
    pub transitions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Opportunity CSV, or a catcher cells CSV with --from-cells
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Read tabulated catcher cells instead of opportunities
    #[arg(long)]
    pub from_cells: bool,
    #[command(flatten)]
    pub tables: TableArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-situation breakdown (catcher only)
    #[arg(long)]
    pub situations: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct SamplerArgs {
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Run-value ledger CSV
    #[arg(long)]
    pub ledger: PathBuf,
    /// Binary draws file; the player index goes to `<stem>.index.csv`
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// Write mu0 and tau2 traces to this CSV
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub draws: PathBuf,
    #[arg(long)]
    pub ledger: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Print the best and worst k players
    #[arg(long)]
    pub top: Option<usize>,
    /// Catcher cells CSV, for attempt percentages
    #[arg(long)]
    pub cells: Option<PathBuf>,
    /// Interval plot data CSV
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation TOML
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Opportunity CSV
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub tables: TableArgs,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// Size of the best and worst rankings
    #[arg(long)]
    pub top: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
