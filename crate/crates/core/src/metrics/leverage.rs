use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};
use crate::pbp::Shift;

/// Context a player's minutes were played in.
#[derive(Debug, Clone, PartialEq)]
pub struct LeverageProfile {
    pub player: String,
    pub n_shifts: usize,
    /// Mean win probability of the player's team at shift start.
    pub mean_start_wp: f64,
    pub mean_duration_sec: f64,
}

impl LeverageProfile {
    fn features(&self) -> Vector3<f64> {
        Vector3::new(self.n_shifts as f64, self.mean_start_wp, self.mean_duration_sec)
    }
}

/// One profile per player id, sorted by id. Zero-length shifts count toward
/// `n_shifts` like any other.
pub fn leverage_profiles(shifts: &[Shift]) -> Vec<LeverageProfile> {
    let mut acc: BTreeMap<&str, (usize, f64, f64)> = BTreeMap::new();
    for s in shifts {
        let d = s.duration() as f64;
        for (players, wp) in [(&s.home_players, s.wp_start), (&s.away_players, 1.0 - s.wp_start)] {
            for p in players {
                let e = acc.entry(p.as_str()).or_default();
                e.0 += 1;
                e.1 += wp;
                e.2 += d;
            }
        }
    }
    acc.into_iter()
        .map(|(player, (n, wp, d))| LeverageProfile {
            player: player.to_string(),
            n_shifts: n,
            mean_start_wp: wp / n as f64,
            mean_duration_sec: d / n as f64,
        })
        .collect()
}

/// Player ids seen on court for each team, sorted. A traded player appears
/// under each team it played for.
pub fn rosters(shifts: &[Shift]) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for s in shifts {
        for (team, players) in [(&s.home_team, &s.home_players), (&s.away_team, &s.away_players)] {
            out.entry(team.clone()).or_default().extend(players.iter().cloned());
        }
    }
    out.into_iter().map(|(t, ps)| (t, ps.into_iter().collect())).collect()
}

/// Mahalanobis metric fitted to a set of leverage profiles.
#[derive(Debug, Clone)]
pub struct ProfileMetric {
    precision: Matrix3<f64>,
}

/// Smallest eigenvalue ratio accepted without regularisation.
const CONDITION_FLOOR: f64 = 1e-12;

impl ProfileMetric {
    /// Sample covariance (divisor n - 1) of the three features. When it is
    /// near-singular, `1e-8 * trace / 3` is added to the diagonal.
    pub fn fit(profiles: &[LeverageProfile]) -> Result<Self> {
        if profiles.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 profiles, got {}",
                profiles.len()
            )));
        }
        let n = profiles.len() as f64;
        let mean = profiles.iter().map(|p| p.features()).sum::<Vector3<f64>>() / n;
        let mut cov = Matrix3::zeros();
        for p in profiles {
            let d = p.features() - mean;
            cov += d * d.transpose();
        }
        cov /= n - 1.0;
        Self::from_covariance(cov)
    }

    pub fn from_covariance(mut cov: Matrix3<f64>) -> Result<Self> {
        if well_conditioned(&cov).is_none() {
            let bump = 1e-8 * cov.trace() / 3.0;
            for i in 0..3 {
                cov[(i, i)] += bump;
            }
        }
        if well_conditioned(&cov).is_none() {
            return Err(Error::Singular("profile covariance is singular after regularisation".into()));
        }
        let precision = cov
            .try_inverse()
            .ok_or_else(|| Error::Singular("profile covariance is not invertible".into()))?;
        Ok(Self {
            precision: (precision + precision.transpose()) / 2.0,
        })
    }

    pub fn distance(&self, a: &LeverageProfile, b: &LeverageProfile) -> f64 {
        let d = a.features() - b.features();
        (d.transpose() * self.precision * d)[(0, 0)].max(0.0).sqrt()
    }
}

fn well_conditioned(cov: &Matrix3<f64>) -> Option<()> {
    if !cov.iter().all(|v| v.is_finite()) {
        return None;
    }
    let eig = SymmetricEigen::new(*cov).eigenvalues;
    let max = eig.max();
    let min = eig.min();
    (max > 0.0 && min > CONDITION_FLOOR * max).then_some(())
}

/// Mahalanobis distance between two profiles under the covariance of `all`.
pub fn mahalanobis_distance(all: &[LeverageProfile], a: &str, b: &str) -> Result<f64> {
    let metric = ProfileMetric::fit(all)?;
    let pa = find(all, a)?;
    let pb = find(all, b)?;
    Ok(metric.distance(pa, pb))
}

fn find<'a>(all: &'a [LeverageProfile], id: &str) -> Result<&'a LeverageProfile> {
    all.iter()
        .find(|p| p.player == id)
        .ok_or_else(|| Error::UnknownCoefficient(id.to_string()))
}

/// The `k` profiles closest to `id`, excluding itself, nearest first.
pub fn similar_players(profiles: &[LeverageProfile], id: &str, k: usize) -> Result<Vec<(String, f64)>> {
    let metric = ProfileMetric::fit(profiles)?;
    let target = find(profiles, id)?;
    let mut out: Vec<(String, f64)> = profiles
        .iter()
        .filter(|p| p.player != id)
        .map(|p| (p.player.clone(), metric.distance(target, p)))
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out.truncate(k);
    Ok(out)
}
