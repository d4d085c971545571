//! Data stages: simulate, ingest, winprob, build, fit.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::NaiveDate;
use clap::Args;
use wpimpact::blasso::{fit_chains, gibbs_fit, Hyperprior, SamplerConfig};
use wpimpact::pbp::{build_dataset, filter_logs, parse_events, segment_shifts, GameLog, SeasonRange, Shift};
use wpimpact::simgen::{generate_season, SimConfig};
use wpimpact::wpgrid::{
    accumulate_counts, build_grid, end_of_period_samples, fit_probit, GridAxes, GridConfig, PseudoGames, Window,
};
use wpimpact::{io, seed};

use crate::config::{invalid, ConfigFile};
use crate::OutDir;

pub fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

pub fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

pub fn read_events(path: &Path) -> Result<Vec<GameLog>> {
    parse_events(open(path)?).with_context(|| format!("reading events {}", path.display()))
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    out: OutDir,
    /// Top-level seed; the season uses a derived sub-seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Number of teams [default: 4]
    #[arg(long)]
    teams: Option<usize>,
    /// Players per team [default: 10]
    #[arg(long)]
    roster: Option<usize>,
    /// Number of games [default: 300]
    #[arg(long)]
    games: Option<usize>,
    /// Half of each roster gets +effect, the rest -effect [default: 0.01]
    #[arg(long)]
    player_effect: Option<f64>,
    /// Teams alternate between +effect and -effect [default: 0]
    #[arg(long)]
    team_effect: Option<f64>,
    /// Sd of the per-shift effect noise [default: 0.05]
    #[arg(long)]
    sigma: Option<f64>,
    /// Expected shifts per regulation game [default: 31]
    #[arg(long)]
    shifts_per_game: Option<f64>,
    /// Season label (start year) [default: 2013]
    #[arg(long)]
    season: Option<i32>,
}

pub fn simulate(a: &SimulateArgs, cfg: &ConfigFile) -> Result<()> {
    let dir = a.out.resolve(cfg)?;
    let top = cfg.or(a.seed, "seed", 0)?;
    let mut config = SimConfig::new(
        cfg.or(a.teams, "teams", 4)?,
        cfg.or(a.roster, "roster", 10)?,
        cfg.or(a.games, "games", 300)?,
        seed::derive(top, "simulate"),
    );
    config.validate()?;
    config = config.with_split_effects(cfg.or(a.player_effect, "player-effect", 0.01)?, cfg.or(a.team_effect, "team-effect", 0.0)?);
    config.sigma = cfg.or(a.sigma, "sigma", 0.05)?;
    config.shifts_per_game = cfg.or(a.shifts_per_game, "shifts-per-game", 31.0)?;
    config.season = cfg.or(a.season, "season", 2013)?;
    let (logs, truth) = generate_season(&config)?;
    io::write_events(&logs, create(&dir, "events.csv")?)?;
    io::write_truth(&truth, create(&dir, "truth.csv")?)?;
    println!("simulated {} games -> {}", logs.len(), dir.join("events.csv").display());
    Ok(())
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Event CSV
    #[arg(long)]
    events: Option<PathBuf>,
    /// Also write games.csv here
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

pub fn ingest(a: &IngestArgs, cfg: &ConfigFile) -> Result<()> {
    let logs = read_events(&cfg.require(a.events.clone(), "events")?)?;
    let n_events: usize = logs.iter().map(|l| l.events.len()).sum();
    let seasons: BTreeSet<i32> = logs.iter().map(GameLog::season).collect();
    let teams: BTreeSet<&str> = logs.iter().flat_map(|l| [l.home_team.as_str(), l.away_team.as_str()]).collect();
    let players: BTreeSet<&str> = logs
        .iter()
        .flat_map(|l| l.events.iter().filter_map(|e| e.player_in.as_deref()))
        .collect();
    println!("games: {}", logs.len());
    println!("events: {n_events}");
    println!("seasons: {}", seasons.iter().map(i32::to_string).collect::<Vec<_>>().join(" "));
    println!("teams: {}", teams.len());
    println!("players: {}", players.len());
    if let (Some(first), Some(last)) = (logs.iter().map(|l| l.date).min(), logs.iter().map(|l| l.date).max()) {
        println!("dates: {first} to {last}");
    }
    if let Some(dir) = cfg.opt(a.out_dir.clone(), "out-dir")? {
        crate::config::ensure_dir(&dir)?;
        let rows = logs.iter().map(|l| {
            let (h, aw) = l.final_score();
            vec![
                l.game_id.clone(),
                l.date.to_string(),
                l.season().to_string(),
                l.home_team.clone(),
                l.away_team.clone(),
                h.to_string(),
                aw.to_string(),
                l.end_sec.to_string(),
            ]
        });
        io::write_table(
            &["game_id", "date", "season", "home_team", "away_team", "home_score", "away_score", "end_sec"],
            rows,
            create(&dir, "games.csv")?,
        )?;
    }
    Ok(())
}

/// Season and date filters shared by winprob and build.
#[derive(Args, Debug, Clone)]
pub struct GameFilter {
    /// Keep games played on or before this date (YYYY-MM-DD)
    #[arg(long)]
    before_date: Option<NaiveDate>,
}

impl GameFilter {
    fn before(&self, cfg: &ConfigFile) -> Result<Option<NaiveDate>> {
        cfg.opt(self.before_date, "before-date")
    }
}

#[derive(Args, Debug)]
pub struct WinprobArgs {
    #[arg(long)]
    events: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
    /// Seasons used to estimate the grid, e.g. 2006-2012 [default: all]
    #[arg(long)]
    train_seasons: Option<SeasonRange>,
    #[command(flatten)]
    filter: GameFilter,
    /// Window half-width in seconds [default: 3]
    #[arg(long)]
    ht: Option<u32>,
    /// Window half-width in points [default: 2]
    #[arg(long)]
    hl: Option<u32>,
    /// Pseudo-games per cell [default: 10]
    #[arg(long)]
    pseudo_games: Option<f64>,
    /// Lead beyond which pseudo-games are all wins or all losses [default: 20]
    #[arg(long)]
    pseudo_threshold: Option<i32>,
    /// Overtimes covered by the time axis [default: 5]
    #[arg(long)]
    max_overtimes: Option<u32>,
    /// Also fit the probit baseline and write probit.csv
    #[arg(long)]
    probit: bool,
}

pub fn winprob(a: &WinprobArgs, cfg: &ConfigFile) -> Result<()> {
    let dir = a.out.resolve(cfg)?;
    let logs = read_events(&cfg.require(a.events.clone(), "events")?)?;
    let seasons = cfg.opt(a.train_seasons, "train-seasons")?;
    let train = filter_logs(&logs, seasons, a.filter.before(cfg)?);
    if train.is_empty() {
        return Err(invalid("no games left after the season and date filters".into()));
    }
    let defaults = GridConfig::default();
    let config = GridConfig {
        window: Window {
            ht: cfg.or(a.ht, "ht", defaults.window.ht)?,
            hl: cfg.or(a.hl, "hl", defaults.window.hl)?,
        },
        pseudo: PseudoGames {
            per_cell: cfg.or(a.pseudo_games, "pseudo-games", defaults.pseudo.per_cell)?,
            threshold: cfg.or(a.pseudo_threshold, "pseudo-threshold", defaults.pseudo.threshold)?,
        },
    };
    let axes = GridAxes::with_overtimes(cfg.or(a.max_overtimes, "max-overtimes", 5)?);
    let grid = build_grid(accumulate_counts(&train, axes), config)?;
    io::write_grid(&grid, create(&dir, "grid.csv")?)?;
    println!("grid from {} games -> {}", train.len(), dir.join("grid.csv").display());
    if a.probit {
        let fit = fit_probit(&end_of_period_samples(&train))?;
        io::write_table(
            &["drift", "volatility"],
            [vec![fit.drift.to_string(), fit.volatility.to_string()]],
            create(&dir, "probit.csv")?,
        )?;
        println!("probit baseline: drift {:.3}, volatility {:.3}", fit.drift, fit.volatility);
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    events: Option<PathBuf>,
    /// Grid file written by `winprob`
    #[arg(long)]
    grid: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
    /// Seasons whose shifts enter the dataset, e.g. 2013 [default: all]
    #[arg(long)]
    apply_season: Option<SeasonRange>,
    #[command(flatten)]
    filter: GameFilter,
}

pub fn build(a: &BuildArgs, cfg: &ConfigFile) -> Result<()> {
    let dir = a.out.resolve(cfg)?;
    let logs = read_events(&cfg.require(a.events.clone(), "events")?)?;
    let grid_path: PathBuf = cfg.require(a.grid.clone(), "grid")?;
    let grid = io::read_grid(open(&grid_path)?).with_context(|| format!("reading grid {}", grid_path.display()))?;
    let games = filter_logs(&logs, cfg.opt(a.apply_season, "apply-season")?, a.filter.before(cfg)?);
    let shifts: Vec<Shift> = games.iter().flat_map(|g| segment_shifts(g, &grid)).collect();
    let data = build_dataset(&shifts)?;
    io::write_shifts(&shifts, create(&dir, "shifts.csv")?)?;
    io::write_dataset(&data, create(&dir, "dataset.csv")?)?;
    println!(
        "{} games, {} shifts, {} players, {} teams -> {}",
        games.len(),
        data.n(),
        data.n_players,
        data.n_teams(),
        dir.join("dataset.csv").display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Dataset written by `build`
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
    /// Discarded sweeps [default: 2000]
    #[arg(long)]
    burn_in: Option<usize>,
    /// Keep every thin-th sweep [default: 10]
    #[arg(long)]
    thin: Option<usize>,
    /// Retained draws per chain [default: 1000]
    #[arg(long)]
    keep: Option<usize>,
    /// Top-level seed; the sampler uses a derived sub-seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Shape of the Gamma prior on lambda^2 [default: 2]
    #[arg(long)]
    r: Option<f64>,
    /// Rate of the Gamma prior on lambda^2 [default: 0.1]
    #[arg(long)]
    delta: Option<f64>,
    /// Hold lambda^2 fixed at this value
    #[arg(long)]
    lambda2: Option<f64>,
    /// Independent chains, run in parallel and concatenated [default: 1]
    #[arg(long)]
    chains: Option<usize>,
}

pub fn fit(a: &FitArgs, cfg: &ConfigFile) -> Result<()> {
    let dir = a.out.resolve(cfg)?;
    let path: PathBuf = cfg.require(a.dataset.clone(), "dataset")?;
    let data = io::read_dataset(open(&path)?).with_context(|| format!("reading dataset {}", path.display()))?;
    let defaults = SamplerConfig::default();
    let config = SamplerConfig {
        burn_in: cfg.or(a.burn_in, "burn-in", defaults.burn_in)?,
        thin: cfg.or(a.thin, "thin", defaults.thin)?,
        n_keep: cfg.or(a.keep, "keep", defaults.n_keep)?,
        seed: seed::derive(cfg.or(a.seed, "seed", 0)?, "fit"),
        hyper: Hyperprior {
            r: cfg.or(a.r, "r", defaults.hyper.r)?,
            delta: cfg.or(a.delta, "delta", defaults.hyper.delta)?,
        },
        fixed_lambda2: cfg.opt(a.lambda2, "lambda2")?,
    };
    let chains = cfg.or(a.chains, "chains", 1)?;
    let draws = match chains {
        0 => return Err(invalid("--chains must be at least 1".into())),
        1 => gibbs_fit(&data, &config)?,
        c => fit_chains(&data, &config, c)?,
    };
    io::write_draws(&draws, create(&dir, "draws.csv")?)?;
    io::write_table(
        &["draw", "lambda2"],
        draws.lambda2.iter().enumerate().map(|(i, l)| vec![i.to_string(), l.to_string()]),
        create(&dir, "lambda2.csv")?,
    )?;
    println!(
        "{} draws of {} coefficients from {} shifts -> {}",
        draws.n_draws(),
        draws.p(),
        data.n(),
        dir.join("draws.csv").display()
    );
    Ok(())
}
