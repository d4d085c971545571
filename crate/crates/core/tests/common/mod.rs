//! Shared fixtures and statistical oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use statrs::distribution::{ContinuousCDF, Gamma, Normal};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use wpimpact::blasso::{gibbs_fit, GibbsSampler, SamplerConfig};
use wpimpact::metrics::mean_sd;
use wpimpact::pbp::{build_dataset, segment_shifts, RegressionDataset, Shift};
use wpimpact::simgen::{generate_season, SimConfig, Truth};
use wpimpact::wpgrid::{accumulate_counts, build_grid, GridAxes, GridConfig, WinProbGrid};

/// Two-sided one-sample Kolmogorov-Smirnov test; returns `(D, p)` using the
/// asymptotic distribution with the Stephens small-sample correction.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    (d, kolmogorov_sf(lambda))
}

/// `P(K > lambda)` for the Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `y = mu + X beta + sigma * eps` with iid standard normal design columns.
pub fn linear_dataset(n: usize, mu: f64, beta: &[f64], sigma: f64, seed: u64) -> RegressionDataset {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p = beta.len();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let e: f64 = rng.sample(StandardNormal);
        y.push(mu + x.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>() + sigma * e);
        rows.push(x.into_iter().enumerate().collect());
    }
    let columns = (0..p).map(|j| format!("player:x{j}")).collect();
    RegressionDataset::new(columns, p, rows, y).unwrap()
}

/// Posterior mean and sd of the slope in `y = mu + x beta + e` under a flat
/// prior on `mu`, `1/sigma2` on `sigma2` and a Laplace prior with rate
/// `sqrt(lambda2) / sigma` on `beta`, by brute-force quadrature over
/// `(beta, log sigma2)` after integrating `mu` out analytically.
pub fn slope_posterior_by_quadrature(x: &[f64], y: &[f64], lambda2: f64) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let lambda = lambda2.sqrt();
    let ols = sxy / sxx;
    let resid_var = ((syy - sxy * sxy / sxx) / (n - 2.0)).max(1e-12);
    let se = (resid_var / sxx).sqrt();

    let (nb, ns) = (4001usize, 2001usize);
    let (b_lo, b_hi) = (ols - 12.0 * se, ols + 12.0 * se);
    let (s_lo, s_hi) = (resid_var.ln() - 4.0, resid_var.ln() + 4.0);
    let db = (b_hi - b_lo) / (nb - 1) as f64;
    let ds = (s_hi - s_lo) / (ns - 1) as f64;
    // log density in (beta, v = sigma2) is
    //   -(n + 1)/2 log v - 1/2 log v - lambda |beta| / sqrt(v) - S(beta) / (2 v)
    // and the change to t = log v adds t
    let mut logs = Vec::with_capacity(nb * ns);
    for i in 0..nb {
        let b = b_lo + db * i as f64;
        let s_beta = syy - 2.0 * b * sxy + b * b * sxx;
        for k in 0..ns {
            let t = s_lo + ds * k as f64;
            let v = t.exp();
            let lp = -(n + 2.0) / 2.0 * t - lambda * b.abs() / v.sqrt() - s_beta / (2.0 * v) + t;
            logs.push(lp);
        }
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..nb {
        let b = b_lo + db * i as f64;
        let w: f64 = logs[i * ns..(i + 1) * ns].iter().map(|l| (l - max).exp()).sum();
        z += w;
        m1 += w * b;
        m2 += w * b * b;
    }
    let mean = m1 / z;
    (mean, (m2 / z - mean * mean).sqrt())
}

/// Win-probability grid trained on an independent simulated league.
pub fn training_grid(n_games: usize, seed: u64) -> WinProbGrid {
    let (logs, _) = generate_season(&SimConfig::new(6, 10, n_games, seed)).unwrap();
    build_grid(accumulate_counts(&logs, GridAxes::default()), GridConfig::default()).unwrap()
}

pub struct SimulatedSeason {
    pub shifts: Vec<Shift>,
    pub data: RegressionDataset,
    pub truth: Truth,
}

pub fn simulated_season(config: &SimConfig, grid: &WinProbGrid) -> SimulatedSeason {
    let (logs, truth) = generate_season(config).unwrap();
    let shifts: Vec<Shift> = logs.iter().flat_map(|l| segment_shifts(l, grid)).collect();
    let data = build_dataset(&shifts).unwrap();
    SimulatedSeason { shifts, data, truth }
}

/// Schedule for the small fixtures.
pub fn small_config(seed: u64) -> SamplerConfig {
    SamplerConfig {
        burn_in: 300,
        thin: 2,
        n_keep: 500,
        seed,
        ..SamplerConfig::default()
    }
}

/// Short schedule for tests where mixing, not precision, matters.
pub fn quick_config(seed: u64) -> SamplerConfig {
    SamplerConfig {
        burn_in: 500,
        thin: 2,
        n_keep: 1000,
        seed,
        ..SamplerConfig::default()
    }
}

/// Fit with the quick schedule.
pub fn quick_fit(data: &RegressionDataset, seed: u64) -> wpimpact::blasso::PosteriorDraws {
    gibbs_fit(data, &quick_config(seed)).unwrap()
}

/// Closed-form inverse-Gaussian CDF.
pub fn ig_cdf(x: f64, m: f64, s: f64) -> f64 {
    let n = Normal::standard();
    let r = (s / x).sqrt();
    n.cdf(r * (x / m - 1.0)) + (2.0 * s / m).exp() * n.cdf(-r * (x / m + 1.0))
}

/// Posterior of the slope under a fixed lambda2, checked against quadrature.
pub fn quadrature_check() -> (f64, f64, f64, f64) {
    let data = linear_dataset(30, 0.1, &[0.4], 1.0, 42);
    let pilot = gibbs_fit(&data, &small_config(1)).unwrap();
    let lambda2 = {
        let mut l = pilot.lambda2.clone();
        l.sort_by(f64::total_cmp);
        l[l.len() / 2]
    };
    let x: Vec<f64> = (0..30).map(|i| data.dense_row(i)[0]).collect();
    let (qm, qs) = slope_posterior_by_quadrature(&x, &data.y, lambda2);
    let cfg = SamplerConfig {
        burn_in: 1000,
        thin: 5,
        n_keep: 40_000,
        seed: 2,
        fixed_lambda2: Some(lambda2),
        ..SamplerConfig::default()
    };
    let draws = gibbs_fit(&data, &cfg).unwrap();
    let (gm, gs) = mean_sd(&draws.column(0));
    (gm, gs, qm, qs)
}

fn frozen_state_fixture() -> RegressionDataset {
    linear_dataset(40, 0.3, &[0.5, -0.2, 0.0], 0.7, 14)
}

/// KS p-values of every full conditional against its closed form, with the
/// rest of the state frozen.
pub fn conditional_ks_pvalues(seed: u64) -> Vec<(String, f64)> {
    let data = frozen_state_fixture();
    let sampler = GibbsSampler::new(&data, small_config(0)).unwrap();
    let mut base = sampler.initial_state();
    base.beta = vec![0.4, -0.1, 0.05];
    base.mu = 0.25;
    base.sigma2 = 0.5;
    base.scales = vec![0.8, 1.5, 0.3];
    base.lambda2 = 2.0;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut results: Vec<(String, f64)> = Vec::new();
    let reps = 10_000;
    let cp = sampler.cross_products();
    let p = 3;

    // coefficients: every marginal of the joint normal
    let mut a = cp.xtx.clone();
    for j in 0..p {
        a[(j, j)] += 1.0 / base.scales[j];
    }
    let a_inv: DMatrix<f64> = a.clone().try_inverse().unwrap();
    let b = &cp.xty - &cp.col_sums * base.mu;
    let mean = &a_inv * b;
    let mut beta_draws = vec![Vec::with_capacity(reps); p];
    for _ in 0..reps {
        let mut s = base.clone();
        sampler.draw_coefficients(&mut s, &mut rng, 0).unwrap();
        for j in 0..p {
            beta_draws[j].push(s.beta[j]);
        }
    }
    for j in 0..p {
        let law = Normal::new(mean[j], (base.sigma2 * a_inv[(j, j)]).sqrt()).unwrap();
        let (_, pv) = ks_test(&beta_draws[j], |x| law.cdf(x));
        results.push((format!("beta_{j}"), pv));
    }

    // intercept
    let n = cp.n as f64;
    let fitted: f64 = (0..p).map(|j| cp.col_sums[j] * base.beta[j]).sum();
    let law = Normal::new((cp.sum_y - fitted) / n, (base.sigma2 / n).sqrt()).unwrap();
    let mu_draws: Vec<f64> = (0..reps)
        .map(|_| {
            let mut s = base.clone();
            sampler.draw_intercept(&mut s, &mut rng);
            s.mu
        })
        .collect();
    results.push(("mu".into(), ks_test(&mu_draws, |x| law.cdf(x)).1));

    // noise variance: 1/sigma2 ~ Gamma(shape, rate = scale), RSS computed here
    let rss: f64 = (0..data.n())
        .map(|i| {
            let x = data.dense_row(i);
            let f = base.mu + (0..p).map(|j| x[j] * base.beta[j]).sum::<f64>();
            (data.y[i] - f).powi(2)
        })
        .sum();
    let penalty: f64 = (0..p).map(|j| base.beta[j].powi(2) / base.scales[j]).sum();
    let prec = Gamma::new((n + p as f64) / 2.0, (rss + penalty) / 2.0).unwrap();
    let s2_draws: Vec<f64> = (0..reps)
        .map(|_| {
            let mut s = base.clone();
            sampler.draw_sigma2(&mut s, &mut rng);
            s.sigma2
        })
        .collect();
    results.push(("sigma2".into(), ks_test(&s2_draws, |x| 1.0 - prec.cdf(1.0 / x)).1));

    // latent scales: 1/s2_j ~ IG(sqrt(lambda2 sigma2 / beta_j^2), lambda2)
    let mut inv_scales = vec![Vec::with_capacity(reps); p];
    for _ in 0..reps {
        let mut s = base.clone();
        sampler.draw_scales(&mut s, &mut rng).unwrap();
        for j in 0..p {
            inv_scales[j].push(1.0 / s.scales[j]);
        }
    }
    for j in 0..p {
        let m = (base.lambda2 * base.sigma2 / base.beta[j].powi(2)).sqrt();
        let (_, pv) = ks_test(&inv_scales[j], |x| ig_cdf(x, m, base.lambda2));
        results.push((format!("inv_scale_{j}"), pv));
    }

    // shrinkage: Gamma(p + r, delta + sum s2 / 2)
    let law = Gamma::new(p as f64 + 2.0, 0.1 + base.scales.iter().sum::<f64>() / 2.0).unwrap();
    let l_draws: Vec<f64> = (0..reps)
        .map(|_| {
            let mut s = base.clone();
            sampler.draw_lambda2(&mut s, &mut rng);
            s.lambda2
        })
        .collect();
    results.push(("lambda2".into(), ks_test(&l_draws, |x| law.cdf(x)).1));
    results
}

