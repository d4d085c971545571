//! Posterior summaries of player, team and lineup effects.
//!
//! Functions here address coefficients by their full names (see
//! [`crate::pbp::player_key`] and [`crate::pbp::team_key`]).

mod kde;
mod leverage;
mod lineup;
mod perm;
mod ranking;

pub use kde::{kde, silverman_bandwidth, KDE_POINTS};
pub use leverage::{leverage_profiles, mahalanobis_distance, rosters, similar_players, LeverageProfile, ProfileMetric};
pub use lineup::{lineup_effect, matchup_predict, matchup_predict_with_noise, Lineup, LineupEffect, Matchup, MatchupPrediction};
pub use perm::{pearson, perm_test_corr, spearman, PermTest};
pub use ranking::{exceedance_prob, impact_ranking, impact_score, impact_scores, rank_intervals, RankEntry, RankInterval, TeamRanking};

use crate::error::{Error, Result};

/// Mean, sample sd (divisor `S - 1`), their ratio, and the share of
/// positive samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactSummary {
    pub id: String,
    pub post_mean: f64,
    pub post_sd: f64,
    pub impact_score: f64,
    pub frac_positive: f64,
}

/// Summarise one set of posterior samples.
pub fn summarize(id: &str, samples: &[f64]) -> Result<ImpactSummary> {
    if samples.len() < 2 {
        return Err(Error::Degenerate(format!("{id}: need at least two draws")));
    }
    let (mean, sd) = mean_sd(samples);
    if !(sd > 0.0) {
        return Err(Error::Degenerate(format!("{id}: posterior draws have zero variance")));
    }
    let positive = samples.iter().filter(|&&x| x > 0.0).count();
    Ok(ImpactSummary {
        id: id.to_string(),
        post_mean: mean,
        post_sd: sd,
        impact_score: mean / sd,
        frac_positive: positive as f64 / samples.len() as f64,
    })
}

/// Mean and sample standard deviation (divisor `n - 1`).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
