//! Posterior summaries: report, matchup, permtest.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use wpimpact::blasso::PosteriorDraws;
use wpimpact::metrics::{
    impact_ranking, impact_score, kde, lineup_effect, leverage_profiles, matchup_predict, perm_test_corr, rank_intervals,
    rosters, similar_players, ImpactSummary, Lineup, Matchup, KDE_POINTS,
};
use wpimpact::pbp::{player_key, Shift};
use wpimpact::{io, seed};

use crate::config::{invalid, ConfigFile};
use crate::pipeline::{create, open};
use crate::OutDir;

const PLAYER_PREFIX: &str = "player:";
const TEAM_PREFIX: &str = "team:";

fn read_draws(path: &Path) -> Result<PosteriorDraws> {
    io::read_draws(open(path)?).with_context(|| format!("reading draws {}", path.display()))
}

fn read_shifts(path: &Path) -> Result<Vec<Shift>> {
    io::read_shifts(open(path)?).with_context(|| format!("reading shifts {}", path.display()))
}

/// Five comma-separated player ids.
fn parse_five(s: &str) -> Result<Vec<String>> {
    let ids: Vec<String> = s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect();
    if ids.len() != 5 {
        return Err(invalid(format!("lineup `{s}` needs 5 comma-separated player ids, got {}", ids.len())));
    }
    Ok(ids)
}

/// File-name-safe form of an id.
fn slug(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn summary_row(s: &ImpactSummary, id: &str) -> Vec<String> {
    vec![
        id.to_string(),
        s.post_mean.to_string(),
        s.post_sd.to_string(),
        s.impact_score.to_string(),
        s.frac_positive.to_string(),
    ]
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Draws written by `fit`
    #[arg(long)]
    draws: Option<PathBuf>,
    /// Shifts written by `build`; needed for rosters and leverage profiles
    #[arg(long)]
    shifts: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
    /// Player to detail (density, similar players); repeatable
    #[arg(long = "player")]
    players: Vec<String>,
    /// Five comma-separated player ids whose summed effect is reported; repeatable
    #[arg(long = "lineup")]
    lineups: Vec<String>,
    /// Similar players listed per requested player [default: 10]
    #[arg(long)]
    neighbors: Option<usize>,
    /// Drop players with fewer shifts from the score table [default: 1]
    #[arg(long)]
    min_shifts: Option<usize>,
    /// Also write 95% within-team rank intervals
    #[arg(long)]
    rank_intervals: bool,
}

pub fn report(a: &ReportArgs, cfg: &ConfigFile) -> Result<()> {
    let dir = a.out.resolve(cfg)?;
    let draws = read_draws(&cfg.require(a.draws.clone(), "draws")?)?;
    let shifts = read_shifts(&cfg.require(a.shifts.clone(), "shifts")?)?;
    let neighbors = cfg.or(a.neighbors, "neighbors", 10)?;
    let min_shifts = cfg.or(a.min_shifts, "min-shifts", 1)?;

    // Requested players are checked first so a typo fails before any output.
    let detail: Vec<(String, ImpactSummary)> = a
        .players
        .iter()
        .map(|p| Ok((p.clone(), impact_score(&draws, &player_key(p))?)))
        .collect::<Result<_>>()?;

    let profiles = leverage_profiles(&shifts);
    let n_shifts: HashMap<&str, usize> = profiles.iter().map(|p| (p.player.as_str(), p.n_shifts)).collect();
    let mut scores = Vec::new();
    for name in draws.names() {
        let Some(id) = name.strip_prefix(PLAYER_PREFIX) else { continue };
        let n = n_shifts.get(id).copied().unwrap_or(0);
        if n < min_shifts {
            continue;
        }
        let mut s = impact_score(&draws, name)?;
        s.id = id.to_string();
        scores.push((s, n));
    }
    scores.sort_by(|x, y| y.0.impact_score.total_cmp(&x.0.impact_score).then_with(|| x.0.id.cmp(&y.0.id)));
    io::write_impact_scores(&scores, create(&dir, "impact_scores.csv")?)?;

    let team_rows = draws
        .names()
        .iter()
        .filter_map(|n| n.strip_prefix(TEAM_PREFIX).map(|id| (n, id)))
        .map(|(n, id)| Ok(summary_row(&impact_score(&draws, n)?, id)))
        .collect::<Result<Vec<_>>>()?;
    io::write_table(&["team", "mean", "sd", "score", "frac_positive"], team_rows, create(&dir, "team_effects.csv")?)?;

    let teams: BTreeMap<String, Vec<String>> = rosters(&shifts)
        .into_iter()
        .map(|(t, ps)| (t, ps.iter().map(|p| player_key(p)).filter(|k| draws.contains(k)).collect()))
        .collect();
    let mut interval_rows = Vec::new();
    for (team, roster) in &teams {
        if roster.len() < 2 {
            continue;
        }
        let ranking = impact_ranking(&draws, team, roster)?;
        let rows = ranking.entries.iter().enumerate().map(|(i, e)| {
            vec![
                (i + 1).to_string(),
                e.id.trim_start_matches(PLAYER_PREFIX).to_string(),
                e.avg_rank.to_string(),
                e.p_next.map(|p| p.to_string()).unwrap_or_default(),
            ]
        });
        io::write_table(
            &["position", "player", "avg_rank", "p_beats_next"],
            rows,
            create(&dir, &format!("rankings_{}.csv", slug(team)))?,
        )?;
        if a.rank_intervals {
            for iv in rank_intervals(&draws, roster, 0.95)? {
                interval_rows.push(vec![
                    team.clone(),
                    iv.id.trim_start_matches(PLAYER_PREFIX).to_string(),
                    iv.lower.to_string(),
                    iv.upper.to_string(),
                    iv.times_first.to_string(),
                ]);
            }
        }
    }
    if a.rank_intervals {
        io::write_table(
            &["team", "player", "lower", "upper", "times_first"],
            interval_rows,
            create(&dir, "rank_intervals.csv")?,
        )?;
    }

    io::write_table(
        &["player", "n_shifts", "mean_start_wp", "mean_duration_sec"],
        profiles.iter().map(|p| {
            vec![
                p.player.clone(),
                p.n_shifts.to_string(),
                p.mean_start_wp.to_string(),
                p.mean_duration_sec.to_string(),
            ]
        }),
        create(&dir, "leverage_profiles.csv")?,
    )?;

    for (id, s) in &detail {
        let samples = draws.column_by_name(&player_key(id))?;
        io::write_table(
            &["x", "density"],
            kde(&samples, KDE_POINTS)?.into_iter().map(|(x, d)| vec![x.to_string(), d.to_string()]),
            create(&dir, &format!("kde_{}.csv", slug(id)))?,
        )?;
        if profiles.iter().any(|p| &p.player == id) {
            let near = similar_players(&profiles, id, neighbors)?;
            io::write_table(
                &["player", "distance"],
                near.into_iter().map(|(p, d)| vec![p, d.to_string()]),
                create(&dir, &format!("similar_{}.csv", slug(id)))?,
            )?;
        }
        println!(
            "{id}: mean {:.5} sd {:.5} score {:.3} P(>0) {:.3}",
            s.post_mean, s.post_sd, s.impact_score, s.frac_positive
        );
    }

    let mut lineup_rows = Vec::new();
    for (i, text) in a.lineups.iter().enumerate() {
        let ids: Vec<String> = parse_five(text)?.iter().map(|p| player_key(p)).collect();
        let effect = lineup_effect(&draws, &ids)?;
        lineup_rows.push(summary_row(&effect.summary, text));
        io::write_table(
            &["draw", "effect"],
            effect.samples.iter().enumerate().map(|(s, v)| vec![s.to_string(), v.to_string()]),
            create(&dir, &format!("lineup_{}.csv", i + 1))?,
        )?;
    }
    if !a.lineups.is_empty() {
        io::write_table(&["lineup", "mean", "sd", "score", "frac_positive"], lineup_rows, create(&dir, "lineups.csv")?)?;
    }

    println!("{} players, {} teams -> {}", scores.len(), teams.len(), dir.display());
    for (s, n) in scores.iter().take(5) {
        println!("  {:<12} score {:>7.3}  mean {:>9.5}  shifts {n}", s.id, s.impact_score, s.post_mean);
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct MatchupArgs {
    #[arg(long)]
    draws: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
    #[arg(long)]
    home_team: String,
    /// Five comma-separated home player ids
    #[arg(long)]
    home: String,
    #[arg(long)]
    away_team: String,
    /// Five comma-separated away player ids
    #[arg(long)]
    away: String,
    /// Top-level seed; the predictive noise uses a derived sub-seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

pub fn matchup(a: &MatchupArgs, cfg: &ConfigFile) -> Result<()> {
    let dir = a.out.resolve(cfg)?;
    let draws = read_draws(&cfg.require(a.draws.clone(), "draws")?)?;
    let home = parse_five(&a.home)?;
    let away = parse_five(&a.away)?;
    let m = Matchup {
        home: Lineup::from_ids(&a.home_team, &home.iter().map(String::as_str).collect::<Vec<_>>()),
        away: Lineup::from_ids(&a.away_team, &away.iter().map(String::as_str).collect::<Vec<_>>()),
    };
    let mut rng = ChaCha20Rng::seed_from_u64(seed::derive(cfg.or(a.seed, "seed", 0)?, "matchup"));
    let pred = matchup_predict(&draws, &m, &mut rng)?;
    io::write_table(
        &["draw", "contrast", "predicted"],
        pred.contrast
            .iter()
            .zip(&pred.samples)
            .enumerate()
            .map(|(s, (c, y))| vec![s.to_string(), c.to_string(), y.to_string()]),
        create(&dir, "matchup_samples.csv")?,
    )?;
    let mut rows = vec![
        vec!["mean".to_string(), pred.mean.to_string()],
        vec!["sd".to_string(), pred.sd.to_string()],
        vec!["prob_positive".to_string(), pred.prob_positive.to_string()],
    ];
    rows.extend(pred.quantiles.iter().map(|(q, v)| vec![format!("q{q}"), v.to_string()]));
    io::write_table(&["stat", "value"], rows, create(&dir, "matchup_summary.csv")?)?;
    println!(
        "{} vs {}: mean {:.5} sd {:.5} P(home gains) {:.3}",
        a.home_team, a.away_team, pred.mean, pred.sd, pred.prob_positive
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct PermtestArgs {
    /// impact_scores.csv from one fit
    #[arg(long)]
    scores_a: PathBuf,
    /// impact_scores.csv from another fit
    #[arg(long)]
    scores_b: PathBuf,
    /// Number of permutations [default: 10000]
    #[arg(long)]
    n_perm: Option<usize>,
    /// Top-level seed; permutations use a derived sub-seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Also write permtest.csv here
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn read_scores(path: &Path) -> Result<BTreeMap<String, f64>> {
    let rows = io::read_impact_scores(open(path)?).with_context(|| format!("reading scores {}", path.display()))?;
    Ok(rows.into_iter().map(|(s, _)| (s.id, s.impact_score)).collect())
}

pub fn permtest(a: &PermtestArgs, cfg: &ConfigFile) -> Result<()> {
    let sa = read_scores(&a.scores_a)?;
    let sb = read_scores(&a.scores_b)?;
    let (x, y): (Vec<f64>, Vec<f64>) = sa.iter().filter_map(|(id, &v)| sb.get(id).map(|&w| (v, w))).unzip();
    let n_perm = cfg.or(a.n_perm, "n-perm", 10_000)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed::derive(cfg.or(a.seed, "seed", 0)?, "permtest"));
    let t = perm_test_corr(&x, &y, n_perm, &mut rng)?;
    println!("players in both: {}", x.len());
    println!("pearson r: {:.6}", t.observed);
    println!("p-value: {:.6} ({} permutations)", t.p_value, t.n_perm);
    if let Some(dir) = cfg.opt(a.out_dir.clone(), "out-dir")? {
        crate::config::ensure_dir(&dir)?;
        io::write_table(
            &["n_players", "pearson_r", "p_value", "n_perm"],
            [vec![x.len().to_string(), t.observed.to_string(), t.p_value.to_string(), t.n_perm.to_string()]],
            create(&dir, "permtest.csv")?,
        )?;
    }
    Ok(())
}
