//! Brownian-motion probit baseline: the final margin is the current lead
//! plus a drift `drift * f` and Gaussian noise with standard deviation
//! `volatility * sqrt(f)`, where `f` is the fraction of regulation left.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::WinProbability;
use crate::error::{Error, Result};
use crate::pbp::{GameLog, REGULATION_SECS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbitBaseline {
    /// Expected home margin gained over a full game, in points.
    pub drift: f64,
    /// Standard deviation of the margin over a full game, in points.
    pub volatility: f64,
}

fn std_normal() -> Normal {
    Normal::standard()
}

/// `Phi((lead + drift * f) / (volatility * sqrt(f)))`.
pub fn probit_wp(lead: f64, frac_remaining: f64, baseline: &ProbitBaseline) -> Result<f64> {
    if !(frac_remaining > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "fraction of game remaining must be positive, got {frac_remaining}"
        )));
    }
    if !(baseline.volatility > 0.0) {
        return Err(Error::InvalidArgument("probit volatility must be positive".into()));
    }
    let z = (lead + baseline.drift * frac_remaining) / (baseline.volatility * frac_remaining.sqrt());
    Ok(std_normal().cdf(z))
}

/// One observed state used to fit the baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbitSample {
    pub lead: f64,
    pub frac_remaining: f64,
    pub home_won: bool,
}

/// States at the ends of the regulation periods before the last one.
pub fn end_of_period_samples(logs: &[GameLog]) -> Vec<ProbitSample> {
    let mut out = Vec::new();
    for log in logs {
        let leads = log.lead_timeline();
        for &t in log.period_breaks.iter().filter(|&&t| t < REGULATION_SECS) {
            out.push(ProbitSample {
                lead: f64::from(leads[t as usize]),
                frac_remaining: f64::from(REGULATION_SECS - t) / f64::from(REGULATION_SECS),
                home_won: log.home_won,
            });
        }
    }
    out
}

/// Maximum-likelihood fit of drift and volatility.
///
/// With `b = 1 / volatility` and `a = drift / volatility` the index is
/// `b * lead / sqrt(f) + a * sqrt(f)`, linear in `(a, b)`, so the fit is an
/// ordinary probit regression solved by Newton's method.
pub fn fit_probit(samples: &[ProbitSample]) -> Result<ProbitBaseline> {
    if samples.len() < 2 {
        return Err(Error::Empty("need at least two samples to fit the probit baseline".into()));
    }
    if samples.iter().any(|s| !(s.frac_remaining > 0.0 && s.frac_remaining <= 1.0)) {
        return Err(Error::InvalidArgument("fraction remaining outside (0, 1]".into()));
    }
    let wins = samples.iter().filter(|s| s.home_won).count();
    if wins == 0 || wins == samples.len() {
        return Err(Error::Degenerate("all samples share one outcome".into()));
    }
    let normal = std_normal();
    let features = |s: &ProbitSample| {
        let r = s.frac_remaining.sqrt();
        [s.lead / r, r]
    };

    let mut beta = [0.1, 0.0];
    for _ in 0..100 {
        let mut grad = [0.0; 2];
        let mut info = [[0.0; 2]; 2];
        for s in samples {
            let x = features(s);
            let z = beta[0] * x[0] + beta[1] * x[1];
            let q = if s.home_won { 1.0 } else { -1.0 };
            let cdf = normal.cdf(q * z).max(1e-300);
            let lambda = q * normal.pdf(q * z) / cdf;
            let w = lambda * (lambda + z);
            for i in 0..2 {
                grad[i] += lambda * x[i];
                for j in 0..2 {
                    info[i][j] += w * x[i] * x[j];
                }
            }
        }
        let det = info[0][0] * info[1][1] - info[0][1] * info[1][0];
        if !(det.abs() > 0.0) {
            return Err(Error::Singular("probit information matrix".into()));
        }
        let step = [
            (info[1][1] * grad[0] - info[0][1] * grad[1]) / det,
            (info[0][0] * grad[1] - info[1][0] * grad[0]) / det,
        ];
        beta[0] += step[0];
        beta[1] += step[1];
        if step[0].abs().max(step[1].abs()) < 1e-12 * (1.0 + beta[0].abs().max(beta[1].abs())) {
            if !(beta[0] > 0.0) {
                return Err(Error::Degenerate("fitted volatility is not positive".into()));
            }
            return Ok(ProbitBaseline {
                drift: beta[1] / beta[0],
                volatility: 1.0 / beta[0],
            });
        }
        if !(beta[0].is_finite() && beta[1].is_finite()) {
            break;
        }
    }
    Err(Error::NoConvergence("probit Newton iterations".into()))
}

/// A fitted baseline evaluated as a win-probability surface.
///
/// Regulation time counts down from 2880 s; in overtime the remaining time
/// is measured to the end of the current five-minute period. At least half
/// a second always remains so the surface is defined at the final horn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbitSurface(pub ProbitBaseline);

impl WinProbability for ProbitSurface {
    fn win_probability(&self, elapsed_sec: u32, lead: i32) -> f64 {
        let remaining = if elapsed_sec < REGULATION_SECS {
            f64::from(REGULATION_SECS - elapsed_sec)
        } else {
            let into_ot = (elapsed_sec - REGULATION_SECS) % crate::pbp::OVERTIME_SECS;
            f64::from(crate::pbp::OVERTIME_SECS - into_ot)
        };
        let f = remaining.max(0.5) / f64::from(REGULATION_SECS);
        probit_wp(f64::from(lead), f, &self.0).expect("positive remaining time")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn symmetric_at_zero() {
        let b = ProbitBaseline { drift: 0.0, volatility: 13.0 };
        for f in [0.01, 0.3, 1.0] {
            assert!((probit_wp(0.0, f, &b).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn leading_late_wins() {
        let b = ProbitBaseline { drift: 3.0, volatility: 13.0 };
        assert!(probit_wp(3.0, 1e-6, &b).unwrap() > 0.999_999);
    }

    #[test]
    fn worked_value() {
        let b = ProbitBaseline { drift: 4.87, volatility: 15.82 };
        let p = probit_wp(5.0, 0.5, &b).unwrap();
        // Phi(0.664645) from a table-independent erf evaluation
        assert!((p - 0.746_861_087).abs() < 1e-6, "{p}");
    }

    #[test]
    fn rejects_nonpositive_fraction() {
        let b = ProbitBaseline { drift: 0.0, volatility: 1.0 };
        assert!(probit_wp(1.0, 0.0, &b).is_err());
        assert!(probit_wp(1.0, -0.1, &b).is_err());
    }

    #[test]
    fn fit_recovers_brownian_parameters() {
        let truth = ProbitBaseline { drift: 4.0, volatility: 12.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut samples = Vec::new();
        for _ in 0..20_000 {
            let mut margin = 0.0;
            let mut states = Vec::new();
            for q in 1..=3 {
                let z: f64 = StandardNormal.sample(&mut rng);
                margin += truth.drift * 0.25 + truth.volatility * 0.5 * z;
                states.push((margin, 1.0 - 0.25 * q as f64));
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            let fin = margin + truth.drift * 0.25 + truth.volatility * 0.5 * z;
            for (lead, f) in states {
                samples.push(ProbitSample { lead, frac_remaining: f, home_won: fin > 0.0 });
            }
        }
        let fit = fit_probit(&samples).unwrap();
        assert!((fit.drift - truth.drift).abs() < 0.6, "{fit:?}");
        assert!((fit.volatility / truth.volatility - 1.0).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn fit_rejects_one_sided_outcomes() {
        let s = vec![ProbitSample { lead: 1.0, frac_remaining: 0.5, home_won: true }; 4];
        assert!(fit_probit(&s).is_err());
    }
}
