use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!("lengths {} and {} differ", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("need at least two pairs".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::Degenerate("correlation of a constant series".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Average ranks, 1-based, ties sharing their mean rank.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    pearson(&ranks(x), &ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermTest {
    pub observed: f64,
    pub p_value: f64,
    pub n_perm: usize,
}

/// Two-sided permutation test of Pearson correlation: the p-value is the
/// share of permutations of `x` whose |r| reaches the observed |r|.
pub fn perm_test_corr<R: Rng + ?Sized>(x: &[f64], y: &[f64], n_perm: usize, rng: &mut R) -> Result<PermTest> {
    if x.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 pairs, got {}", x.len())));
    }
    if n_perm == 0 {
        return Err(Error::InvalidArgument("n_perm must be positive".into()));
    }
    let observed = pearson(x, y)?;
    // comparisons allow for rounding in the re-summed correlation
    let threshold = observed.abs() - 1e-12;
    let mut perm = x.to_vec();
    let mut hits = 0usize;
    for _ in 0..n_perm {
        perm.shuffle(rng);
        if pearson(&perm, y)?.abs() >= threshold {
            hits += 1;
        }
    }
    Ok(PermTest {
        observed,
        p_value: hits as f64 / n_perm as f64,
        n_perm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn identical_series_sit_at_the_extreme() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let t = perm_test_corr(&x, &x, 2000, &mut rng).unwrap();
        assert!((t.observed - 1.0).abs() < 1e-12);
        assert!(t.p_value <= 1.0 / 2000.0);
    }

    #[test]
    fn constant_series_is_an_error() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert!(matches!(
            perm_test_corr(&[1.0, 2.0, 3.0], &[1.0; 3], 10, &mut rng),
            Err(Error::Degenerate(_))
        ));
        assert!(perm_test_corr(&[1.0, 2.0], &[1.0, 3.0], 10, &mut rng).is_err());
    }

    #[test]
    fn independent_series_give_uniform_p() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let mut total = 0.0;
        for _ in 0..200 {
            let x: Vec<f64> = (0..30).map(|_| rng.random()).collect();
            let y: Vec<f64> = (0..30).map(|_| rng.random()).collect();
            total += perm_test_corr(&x, &y, 200, &mut rng).unwrap().p_value;
        }
        let mean = total / 200.0;
        assert!((0.4..=0.6).contains(&mean), "mean p {mean}");
    }

    #[test]
    fn spearman_handles_ties() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 4.0, 9.0, 16.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }
}
