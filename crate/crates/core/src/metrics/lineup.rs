use rand::Rng;
use rand_distr::StandardNormal;

use super::{mean_sd, quantile, summarize, ImpactSummary};
use crate::blasso::PosteriorDraws;
use crate::error::{Error, Result};
use crate::pbp::{player_key, team_key};

/// Per-draw sum of five player effects and its Impact Score.
#[derive(Debug, Clone)]
pub struct LineupEffect {
    pub samples: Vec<f64>,
    pub summary: ImpactSummary,
}

fn lineup_columns(draws: &PosteriorDraws, ids: &[String]) -> Result<Vec<usize>> {
    if ids.len() != 5 {
        return Err(Error::InvalidArgument(format!("a lineup has 5 players, got {}", ids.len())));
    }
    for (i, a) in ids.iter().enumerate() {
        if ids[..i].contains(a) {
            return Err(Error::InvalidArgument(format!("{a} appears twice in the lineup")));
        }
    }
    ids.iter().map(|id| draws.index_of(id)).collect()
}

/// Sum the five coefficients in every draw.
pub fn lineup_effect(draws: &PosteriorDraws, ids: &[String]) -> Result<LineupEffect> {
    let cols = lineup_columns(draws, ids)?;
    let samples: Vec<f64> = (0..draws.n_draws())
        .map(|s| {
            let d = draws.draw(s);
            cols.iter().map(|&j| d[j]).sum()
        })
        .collect();
    let summary = summarize(&ids.join("+"), &samples)?;
    Ok(LineupEffect { samples, summary })
}

/// Five players and their team, as coefficient names.
#[derive(Debug, Clone, PartialEq)]
pub struct Lineup {
    pub team: String,
    pub players: Vec<String>,
}

impl Lineup {
    /// Build from raw team and player ids.
    pub fn from_ids(team: &str, players: &[&str]) -> Self {
        Self {
            team: team_key(team),
            players: players.iter().map(|p| player_key(p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matchup {
    pub home: Lineup,
    pub away: Lineup,
}

impl Matchup {
    pub fn swapped(&self) -> Self {
        Self {
            home: self.away.clone(),
            away: self.home.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatchupPrediction {
    /// Predictive samples, one per retained draw.
    pub samples: Vec<f64>,
    /// The lineup and team contrast of each draw, without intercept or noise.
    pub contrast: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub prob_positive: f64,
    /// (level, value) pairs at 2.5%, 25%, 50%, 75%, 97.5%.
    pub quantiles: Vec<(f64, f64)>,
}

const QUANTILE_LEVELS: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

/// Posterior predictive of the home-perspective win-probability change for
/// one shift between two lineups.
pub fn matchup_predict<R: Rng + ?Sized>(draws: &PosteriorDraws, m: &Matchup, rng: &mut R) -> Result<MatchupPrediction> {
    let z: Vec<f64> = (0..draws.n_draws()).map(|_| rng.sample(StandardNormal)).collect();
    matchup_predict_with_noise(draws, m, &z)
}

/// As [`matchup_predict`] with the standard normal deviates supplied.
pub fn matchup_predict_with_noise(draws: &PosteriorDraws, m: &Matchup, z: &[f64]) -> Result<MatchupPrediction> {
    if z.len() != draws.n_draws() {
        return Err(Error::InvalidArgument(format!(
            "{} noise values for {} draws",
            z.len(),
            draws.n_draws()
        )));
    }
    let home = lineup_columns(draws, &m.home.players)?;
    let away = lineup_columns(draws, &m.away.players)?;
    let th = draws.index_of(&m.home.team)?;
    let ta = draws.index_of(&m.away.team)?;

    let contrast: Vec<f64> = (0..draws.n_draws())
        .map(|s| {
            let d = draws.draw(s);
            let h: f64 = home.iter().map(|&j| d[j]).sum();
            let a: f64 = away.iter().map(|&j| d[j]).sum();
            (h - a) + (d[th] - d[ta])
        })
        .collect();
    let samples: Vec<f64> = contrast
        .iter()
        .enumerate()
        .map(|(s, c)| draws.mu[s] + c + draws.sigma2[s].sqrt() * z[s])
        .collect();

    let (mean, sd) = mean_sd(&samples);
    let positive = samples.iter().filter(|&&x| x > 0.0).count();
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(MatchupPrediction {
        mean,
        sd,
        prob_positive: positive as f64 / samples.len() as f64,
        quantiles: QUANTILE_LEVELS.iter().map(|&q| (q, quantile(&sorted, q))).collect(),
        samples,
        contrast,
    })
}
