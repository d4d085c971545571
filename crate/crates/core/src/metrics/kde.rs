use std::f64::consts::PI;

use super::{mean_sd, quantile};
use crate::error::{Error, Result};

pub const KDE_POINTS: usize = 512;

/// Silverman's rule: `0.9 * min(sd, IQR / 1.34) * n^(-1/5)`, falling back to
/// the sd when the IQR is zero.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Degenerate("bandwidth needs at least two samples".into()));
    }
    let (_, sd) = mean_sd(samples);
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if !(spread > 0.0) {
        return Err(Error::Degenerate("bandwidth of constant samples".into()));
    }
    Ok(0.9 * spread * (samples.len() as f64).powf(-0.2))
}

/// Gaussian kernel density on `n_points` equally spaced points spanning the
/// samples padded by three bandwidths.
pub fn kde(samples: &[f64], n_points: usize) -> Result<Vec<(f64, f64)>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument("need at least two grid points".into()));
    }
    let h = silverman_bandwidth(samples)?;
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let step = (hi - lo) / (n_points - 1) as f64;
    let norm = 1.0 / (samples.len() as f64 * h * (2.0 * PI).sqrt());
    Ok((0..n_points)
        .map(|i| {
            let x = lo + step * i as f64;
            let d: f64 = samples.iter().map(|s| (-0.5 * ((x - s) / h).powi(2)).exp()).sum();
            (x, d * norm)
        })
        .collect())
}
