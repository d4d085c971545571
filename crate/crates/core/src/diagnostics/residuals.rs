use statrs::distribution::{ContinuousCDF, Normal};

use crate::blasso::PosteriorDraws;
use crate::error::{Error, Result};
use crate::metrics::mean_sd;
use crate::pbp::RegressionDataset;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqPoint {
    /// Standard normal quantile at `(k - 0.5) / n`.
    pub theoretical: f64,
    pub raw: f64,
    /// Raw residual divided by the residuals' sample sd.
    pub studentized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSet {
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub qq: Vec<QqPoint>,
}

/// Fitted values are posterior means of `mu + x_i' beta`.
pub fn residual_diagnostics(data: &RegressionDataset, draws: &PosteriorDraws) -> Result<ResidualSet> {
    let cols = data
        .columns
        .iter()
        .map(|c| draws.index_of(c))
        .collect::<Result<Vec<_>>>()?;
    let s = draws.n_draws() as f64;
    let mu_bar = draws.mu.iter().sum::<f64>() / s;
    let beta_bar = draws.coef_means();
    let fitted: Vec<f64> = data
        .rows
        .iter()
        .map(|row| mu_bar + row.iter().map(|&(j, v)| v * beta_bar[cols[j]]).sum::<f64>())
        .collect();
    let residuals: Vec<f64> = data.y.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let qq = qq_points(&residuals)?;
    Ok(ResidualSet { fitted, residuals, qq })
}

fn qq_points(residuals: &[f64]) -> Result<Vec<QqPoint>> {
    let n = residuals.len();
    if n == 0 {
        return Err(Error::Empty("no residuals".into()));
    }
    let sd = if n >= 2 { mean_sd(residuals).1 } else { 0.0 };
    let scale = if sd > 0.0 { 1.0 / sd } else { 0.0 };
    let mut sorted = residuals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(k, r)| QqPoint {
            theoretical: normal.inverse_cdf((k as f64 + 0.5) / n as f64),
            raw: r,
            studentized: r * scale,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width histogram over the range of `values`.
pub fn histogram(values: &[f64], n_bins: usize) -> Result<Vec<HistogramBin>> {
    if values.is_empty() || n_bins == 0 {
        return Err(Error::InvalidArgument("histogram needs values and at least one bin".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument("histogram of non-finite values".into()));
    }
    let width = if hi > lo { (hi - lo) / n_bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        let i = (((v - lo) / width) as usize).min(n_bins - 1);
        counts[i] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lo: lo + width * i as f64,
            hi: lo + width * (i + 1) as f64,
            count,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> RegressionDataset {
        RegressionDataset::new(
            vec!["player:a".into(), "player:b".into(), "team:T".into()],
            2,
            vec![vec![(0, 1.0), (2, 1.0)], vec![(1, -1.0), (2, -1.0)], vec![(0, 1.0), (1, -1.0)]],
            vec![0.1, -0.2, 0.3],
        )
        .unwrap()
    }

    fn draws(names: &[&str], mu: Vec<f64>, coefs: Vec<f64>) -> PosteriorDraws {
        let s = mu.len();
        PosteriorDraws::new(names.iter().map(|n| n.to_string()).collect(), mu, vec![1.0; s], coefs, vec![]).unwrap()
    }

    #[test]
    fn zero_posterior_leaves_the_response() {
        let d = draws(&["player:a", "player:b", "team:T"], vec![0.0], vec![0.0; 3]);
        let r = residual_diagnostics(&data(), &d).unwrap();
        assert_eq!(r.fitted, vec![0.0; 3]);
        assert_eq!(r.residuals, data().y);
    }

    #[test]
    fn opposite_draws_cancel() {
        let d = draws(&["player:a", "player:b", "team:T"], vec![0.1, 0.3], vec![1.0, 2.0, 3.0, -1.0, -2.0, -3.0]);
        let r = residual_diagnostics(&data(), &d).unwrap();
        for f in r.fitted {
            assert!((f - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn crafted_fitted_values() {
        // column order in the draws differs from the dataset
        let d = draws(&["team:T", "player:b", "player:a"], vec![0.01, 0.03], vec![0.1, 0.2, 0.3, 0.3, 0.4, 0.5]);
        // means: mu 0.02, T 0.2, b 0.3, a 0.4
        let r = residual_diagnostics(&data(), &d).unwrap();
        let want = [0.02 + 0.4 + 0.2, 0.02 - 0.3 - 0.2, 0.02 + 0.4 - 0.3];
        for (f, w) in r.fitted.iter().zip(want) {
            assert!((f - w).abs() < 1e-12);
        }
        assert!((r.residuals[0] - (0.1 - want[0])).abs() < 1e-12);
    }

    #[test]
    fn missing_column_is_reported() {
        let d = draws(&["player:a", "player:b"], vec![0.0], vec![0.0; 2]);
        assert!(matches!(residual_diagnostics(&data(), &d), Err(Error::UnknownCoefficient(_))));
    }

    #[test]
    fn qq_is_monotone() {
        let q = qq_points(&[0.3, -1.0, 2.0, 0.0, 0.1]).unwrap();
        for w in q.windows(2) {
            assert!(w[0].theoretical < w[1].theoretical);
            assert!(w[0].raw <= w[1].raw);
            assert!(w[0].studentized <= w[1].studentized);
        }
        assert!(q[2].theoretical.abs() < 1e-12);
    }

    #[test]
    fn histogram_counts() {
        let h = histogram(&[0.0, 0.1, 0.5, 0.9, 1.0], 2).unwrap();
        assert_eq!(h.iter().map(|b| b.count).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(histogram(&[1.0, 1.0], 3).unwrap()[0].count, 2);
    }
}
