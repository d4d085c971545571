//! `wpimpact`: simulate or ingest play-by-play, estimate the win-probability
//! surface, fit the shift regression and write reports.
//!
//! Exit status is 0 on success, 2 for invalid input or arguments and 3 when
//! a numerical routine fails.

mod config;
mod diagnose;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigFile;

#[derive(Parser, Debug)]
#[command(name = "wpimpact", version, about = "Win-probability player impact pipeline")]
struct Cli {
    /// key=value file supplying defaults for any long flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate an event file and summarise its games
    Ingest(pipeline::IngestArgs),
    /// Estimate the win-probability grid from games
    Winprob(pipeline::WinprobArgs),
    /// Segment games into shifts and write the regression dataset
    Build(pipeline::BuildArgs),
    /// Run the Gibbs sampler on a dataset
    Fit(pipeline::FitArgs),
    /// Impact scores, rankings, similarity, lineups and densities
    Report(report::ReportArgs),
    /// Posterior predictive for one lineup matchup
    Matchup(report::MatchupArgs),
    /// Residual, transformation and heteroscedasticity checks
    Diagnose(diagnose::DiagnoseArgs),
    /// Permutation test of the correlation between two score files
    Permtest(report::PermtestArgs),
    /// Generate a synthetic season with known effects
    Simulate(pipeline::SimulateArgs),
}

/// Output directory shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct OutDir {
    /// Directory for emitted files [default: .]
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl OutDir {
    pub fn resolve(&self, cfg: &ConfigFile) -> anyhow::Result<PathBuf> {
        let dir = cfg.or(self.out_dir.clone(), "out-dir", PathBuf::from("."))?;
        config::ensure_dir(&dir)?;
        Ok(dir)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => pipeline::ingest(&a, &cfg),
        Command::Winprob(a) => pipeline::winprob(&a, &cfg),
        Command::Build(a) => pipeline::build(&a, &cfg),
        Command::Fit(a) => pipeline::fit(&a, &cfg),
        Command::Report(a) => report::report(&a, &cfg),
        Command::Matchup(a) => report::matchup(&a, &cfg),
        Command::Diagnose(a) => diagnose::diagnose(&a, &cfg),
        Command::Permtest(a) => report::permtest(&a, &cfg),
        Command::Simulate(a) => pipeline::simulate(&a, &cfg),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .any(|e| e.downcast_ref::<wpimpact::Error>().is_some_and(wpimpact::Error::is_numerical));
    if numerical {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
