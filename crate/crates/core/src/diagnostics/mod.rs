//! Model checks: alternative responses, heteroscedasticity by starting win
//! probability, residuals and autocorrelation.

mod residuals;

pub use residuals::{histogram, residual_diagnostics, HistogramBin, QqPoint, ResidualSet};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::mean_sd;
use crate::pbp::RegressionDataset;

/// Sample autocorrelations at lags `1..=max_lag`.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if series.len() <= max_lag + 1 {
        return Err(Error::InvalidArgument(format!(
            "series of length {} is too short for lag {max_lag}",
            series.len()
        )));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let dev: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if !(denom > 0.0) {
        return Err(Error::Degenerate("autocorrelation of a constant series".into()));
    }
    Ok((1..=max_lag)
        .map(|k| {
            let num: f64 = dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum();
            (num / denom).clamp(-1.0, 1.0)
        })
        .collect())
}

/// The six response variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResponseTag {
    /// Change in win probability.
    Y1,
    /// Change in log-odds of winning.
    Y2,
    /// Inverse logit of the shifted, halved change.
    Y3,
    /// Reweighted to binned sd 1.
    Y4,
    /// Reweighted to binned sd 0.03.
    Y5,
    /// Reweighted to binned sd 0.12.
    Y6,
}

impl ResponseTag {
    pub const ALL: [ResponseTag; 6] = [Self::Y1, Self::Y2, Self::Y3, Self::Y4, Self::Y5, Self::Y6];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Y1 => "y1",
            Self::Y2 => "y2",
            Self::Y3 => "y3",
            Self::Y4 => "y4",
            Self::Y5 => "y5",
            Self::Y6 => "y6",
        }
    }

    /// Binned sd targeted by the reweighted variants.
    pub fn target_sd(self) -> Option<f64> {
        match self {
            Self::Y4 => Some(1.0),
            Self::Y5 => Some(0.03),
            Self::Y6 => Some(0.12),
            _ => None,
        }
    }
}

impl fmt::Display for ResponseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResponseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown response variant {s:?}")))
    }
}

/// Handling of probabilities at exactly 0 or 1 in the log-odds response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogitPolicy {
    /// Clamp to `[1e-6, 1 - 1e-6]`.
    #[default]
    Clamp,
    /// Reject with an error.
    Strict,
}

pub const LOGIT_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVariant {
    pub tag: ResponseTag,
    pub values: Vec<f64>,
    /// Per-row weights, reweighted variants only.
    pub weights: Option<Vec<f64>>,
    pub target_sd: Option<f64>,
}

fn logit(p: f64, policy: LogitPolicy) -> Result<f64> {
    let p = match policy {
        LogitPolicy::Clamp => p.clamp(LOGIT_CLAMP, 1.0 - LOGIT_CLAMP),
        LogitPolicy::Strict if p > 0.0 && p < 1.0 => p,
        LogitPolicy::Strict => {
            return Err(Error::InvalidArgument(format!("log-odds of probability {p}")));
        }
    };
    Ok((p / (1.0 - p)).ln())
}

/// `1 / (1 + exp(-(1 + y) / 2))`.
pub fn squash(y: f64) -> f64 {
    1.0 / (1.0 + (-(1.0 + y) / 2.0).exp())
}

/// Unweighted response variants y1, y2 and y3 from start and end win
/// probabilities.
pub fn transform_response(wp_start: &[f64], wp_end: &[f64], tag: ResponseTag, policy: LogitPolicy) -> Result<ResponseVariant> {
    if wp_start.len() != wp_end.len() {
        return Err(Error::InvalidArgument(format!(
            "{} start and {} end probabilities",
            wp_start.len(),
            wp_end.len()
        )));
    }
    let pairs = wp_start.iter().zip(wp_end);
    let values = match tag {
        ResponseTag::Y1 => pairs.map(|(a, b)| b - a).collect(),
        ResponseTag::Y2 => pairs
            .map(|(&a, &b)| Ok(logit(b, policy)? - logit(a, policy)?))
            .collect::<Result<Vec<_>>>()?,
        ResponseTag::Y3 => pairs.map(|(a, b)| squash(b - a)).collect(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "{other} is a reweighted variant; use reweight_dataset"
            )));
        }
    };
    Ok(ResponseVariant {
        tag,
        values,
        weights: None,
        target_sd: None,
    })
}

/// `k` equal-width bins on [0, 1].
pub fn equal_bins(k: usize) -> Vec<f64> {
    (0..=k).map(|i| i as f64 / k as f64).collect()
}

pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BinSd {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Sample sd; `None` when the bin has fewer than two rows.
    pub sd: Option<f64>,
}

/// Index of the bin holding `x`; bins are half-open except the last.
fn bin_of(edges: &[f64], x: f64) -> Option<usize> {
    let k = edges.len() - 1;
    if !(x >= edges[0] && x <= edges[k]) {
        return None;
    }
    let i = edges.partition_point(|&e| e <= x);
    Some(i.saturating_sub(1).min(k - 1))
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("bin edges must be strictly increasing, at least two".into()));
    }
    Ok(())
}

fn assign_bins(start_wps: &[f64], edges: &[f64]) -> Result<Vec<usize>> {
    check_edges(edges)?;
    start_wps
        .iter()
        .map(|&w| bin_of(edges, w).ok_or_else(|| Error::InvalidArgument(format!("start probability {w} outside the bins"))))
        .collect()
}

/// Sample sd of the responses in each starting-probability bin.
pub fn binned_sd(responses: &[f64], start_wps: &[f64], edges: &[f64]) -> Result<Vec<BinSd>> {
    if responses.len() != start_wps.len() {
        return Err(Error::InvalidArgument(format!(
            "{} responses and {} start probabilities",
            responses.len(),
            start_wps.len()
        )));
    }
    let bins = assign_bins(start_wps, edges)?;
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); edges.len() - 1];
    for (b, &y) in bins.into_iter().zip(responses) {
        groups[b].push(y);
    }
    Ok(groups
        .into_iter()
        .enumerate()
        .map(|(i, g)| BinSd {
            lo: edges[i],
            hi: edges[i + 1],
            count: g.len(),
            sd: (g.len() >= 2).then(|| mean_sd(&g).1),
        })
        .collect())
}

/// Scale each row's response and predictors by `target_sd / sd(bin)`.
pub fn reweight_dataset(
    data: &RegressionDataset,
    start_wps: &[f64],
    edges: &[f64],
    target_sd: f64,
) -> Result<(RegressionDataset, Vec<f64>)> {
    if !(target_sd > 0.0 && target_sd.is_finite()) {
        return Err(Error::InvalidArgument(format!("target sd {target_sd}")));
    }
    let sds = binned_sd(&data.y, start_wps, edges)?;
    let bins = assign_bins(start_wps, edges)?;
    let mut weights = Vec::with_capacity(data.n());
    for &b in &bins {
        let sd = match sds[b].sd {
            Some(sd) if sd > 0.0 => sd,
            Some(_) => return Err(Error::Degenerate(format!("bin [{}, {}] has zero sd", sds[b].lo, sds[b].hi))),
            None => {
                return Err(Error::Degenerate(format!(
                    "bin [{}, {}] has {} row(s)",
                    sds[b].lo, sds[b].hi, sds[b].count
                )))
            }
        };
        weights.push(target_sd / sd);
    }
    let rows = data
        .rows
        .iter()
        .zip(&weights)
        .map(|(row, &w)| row.iter().map(|&(j, v)| (j, v * w)).collect())
        .collect();
    let y = data.y.iter().zip(&weights).map(|(y, w)| y * w).collect();
    let out = RegressionDataset::new(data.columns.clone(), data.n_players, rows, y)?;
    Ok((out, weights))
}

/// A reweighted variant (y4, y5 or y6) of the dataset's response.
pub fn reweighted_variant(
    data: &RegressionDataset,
    start_wps: &[f64],
    edges: &[f64],
    tag: ResponseTag,
) -> Result<(ResponseVariant, RegressionDataset)> {
    let target = tag
        .target_sd()
        .ok_or_else(|| Error::InvalidArgument(format!("{tag} is not a reweighted variant")))?;
    let (out, weights) = reweight_dataset(data, start_wps, edges, target)?;
    Ok((
        ResponseVariant {
            tag,
            values: out.y.clone(),
            weights: Some(weights),
            target_sd: Some(target),
        },
        out,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn acf_of_alternating_series() {
        let x: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = acf(&x, 2).unwrap();
        assert!((r[0] + 1.0).abs() < 0.01);
        assert!((r[1] - 1.0).abs() < 0.01);
    }

    #[test]
    fn acf_of_white_noise() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(acf(&x, 1).unwrap()[0].abs() < 0.05);
    }

    #[test]
    fn acf_errors() {
        assert!(matches!(acf(&[2.0; 10], 1), Err(Error::Degenerate(_))));
        assert!(acf(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn transform_examples() {
        let y3 = transform_response(&[0.5], &[0.5], ResponseTag::Y3, LogitPolicy::Strict).unwrap();
        assert!((y3.values[0] - 0.6224593312018546).abs() < 1e-15);
        assert_eq!(squash(-1.0), 0.5);
        let y2 = transform_response(&[0.22, 0.4], &[0.98, 0.4], ResponseTag::Y2, LogitPolicy::Strict).unwrap();
        assert!((y2.values[0] - 5.157486671441902).abs() < 1e-12);
        assert_eq!(y2.values[1], 0.0);
        let y1 = transform_response(&[0.25], &[0.5], ResponseTag::Y1, LogitPolicy::Strict).unwrap();
        assert_eq!(y1.values, vec![0.25]);
    }

    #[test]
    fn logit_policies() {
        assert!(transform_response(&[0.0], &[0.5], ResponseTag::Y2, LogitPolicy::Strict).is_err());
        let v = transform_response(&[0.0], &[1.0], ResponseTag::Y2, LogitPolicy::Clamp).unwrap();
        let bound = ((1.0 - LOGIT_CLAMP) / LOGIT_CLAMP).ln();
        assert!((v.values[0] - 2.0 * bound).abs() < 1e-9);
        assert!(transform_response(&[0.5], &[0.5], ResponseTag::Y5, LogitPolicy::Clamp).is_err());
    }

    #[test]
    fn tags_parse() {
        for t in ResponseTag::ALL {
            assert_eq!(t.as_str().parse::<ResponseTag>().unwrap(), t);
        }
        assert!("y7".parse::<ResponseTag>().is_err());
    }

    #[test]
    fn binned_sd_examples() {
        let b = binned_sd(&[-0.1, 0.1], &[0.3, 0.35], &[0.0, 1.0]).unwrap();
        assert!((b[0].sd.unwrap() - 0.02f64.sqrt()).abs() < 1e-15);

        let b = binned_sd(&[0.2; 4], &[0.1, 0.2, 0.7, 1.0], &equal_bins(2)).unwrap();
        assert_eq!(b[0].sd, Some(0.0));
        assert_eq!(b[1].sd, Some(0.0));

        // bin 0: {1, 3} -> sd sqrt(2); bin 1: {0, 0, 3} -> mean 1, ss 6, sd sqrt(3)
        let b = binned_sd(&[1.0, 3.0, 0.0, 0.0, 3.0], &[0.0, 0.49, 0.5, 0.9, 1.0], &equal_bins(2)).unwrap();
        assert!((b[0].sd.unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((b[1].sd.unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!((b[0].count, b[1].count), (2, 3));
    }

    #[test]
    fn small_bins_are_flagged() {
        let b = binned_sd(&[1.0, 2.0, 3.0], &[0.1, 0.15, 0.9], &equal_bins(2)).unwrap();
        assert_eq!(b[1].count, 1);
        assert_eq!(b[1].sd, None);
        assert!(binned_sd(&[1.0], &[1.5], &equal_bins(2)).is_err());
    }

    fn dataset(y: Vec<f64>) -> RegressionDataset {
        let rows = (0..y.len()).map(|i| vec![(i % 2, 1.0), (2, -1.0)]).collect();
        RegressionDataset::new(vec!["player:a".into(), "player:b".into(), "team:T".into()], 2, rows, y).unwrap()
    }

    #[test]
    fn reweighting_hits_the_target() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let n = 400;
        let wps: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let y: Vec<f64> = wps
            .iter()
            .map(|w| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * (0.01 + 0.1 * w * (1.0 - w))
            })
            .collect();
        let data = dataset(y);
        let edges = equal_bins(DEFAULT_BINS);
        for tag in [ResponseTag::Y4, ResponseTag::Y5, ResponseTag::Y6] {
            let (v, out) = reweighted_variant(&data, &wps, &edges, tag).unwrap();
            for b in binned_sd(&out.y, &wps, &edges).unwrap() {
                assert!((b.sd.unwrap() - v.target_sd.unwrap()).abs() < 1e-9);
            }
            let w = v.weights.as_ref().unwrap();
            for i in 0..n {
                assert!(w[i] > 0.0);
                assert_eq!(out.rows[i][1].1, -w[i]);
            }
        }
    }

    #[test]
    fn reweighting_to_the_current_sd_is_identity() {
        let y = vec![1.0, -1.0, 1.0, -1.0];
        let wps = vec![0.1, 0.2, 0.6, 0.7];
        let data = dataset(y.clone());
        let sd = binned_sd(&y, &wps, &equal_bins(2)).unwrap()[0].sd.unwrap();
        let (out, w) = reweight_dataset(&data, &wps, &equal_bins(2), sd).unwrap();
        assert!(w.iter().all(|&x| x == 1.0));
        assert_eq!(out.y, data.y);
        assert_eq!(out.rows, data.rows);
    }

    #[test]
    fn zero_sd_bin_is_an_error() {
        let data = dataset(vec![1.0, 1.0, 2.0, 3.0]);
        let r = reweight_dataset(&data, &[0.1, 0.2, 0.6, 0.7], &equal_bins(2), 0.03);
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    proptest! {
        #[test]
        fn acf_is_bounded(xs in prop::collection::vec(-10.0f64..10.0, 5..60)) {
            if let Ok(r) = acf(&xs, 3) {
                prop_assert!(r.iter().all(|v| (-1.0..=1.0).contains(v)));
            }
        }

        #[test]
        fn squash_is_increasing(a in -50.0f64..50.0, d in 1e-6f64..10.0) {
            prop_assert!(squash(a + d) > squash(a));
        }
    }
}
