mod common;

use common::{conditional_ks_pvalues, ig_cdf, ks_test, linear_dataset, quadrature_check};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ContinuousCDF, Gamma};
use wpimpact::blasso::{fit_chains, gibbs_fit, sample_inverse_gaussian, GibbsSampler, Hyperprior, SamplerConfig};
use wpimpact::metrics::mean_sd;
use wpimpact::pbp::RegressionDataset;
use wpimpact::Error;

fn config(seed: u64) -> SamplerConfig {
    common::small_config(seed)
}

#[test]
fn inverse_gaussian_matches_its_cdf() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let xs: Vec<f64> = (0..20_000).map(|_| sample_inverse_gaussian(1.0, 1.0, &mut rng).unwrap()).collect();
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    for q in [0.25, 0.5, 0.75] {
        let x = sorted[(q * sorted.len() as f64) as usize];
        assert!((ig_cdf(x, 1.0, 1.0) - q).abs() < 0.01);
    }
    let (_, p) = ks_test(&xs, |x| ig_cdf(x, 1.0, 1.0));
    assert!(p > 0.01, "KS p {p}");
}

#[test]
fn zero_response_centres_the_coefficients() {
    let base = linear_dataset(200, 0.0, &[0.0; 3], 1.0, 3);
    let data = base.with_response(vec![0.0; 200]).unwrap();
    let sampler = GibbsSampler::new(&data, config(0)).unwrap();
    let mut state = sampler.initial_state();
    state.sigma2 = 1.0;
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut sums = [0.0; 3];
    let reps = 4000;
    for _ in 0..reps {
        let mut s = state.clone();
        sampler.draw_coefficients(&mut s, &mut rng, 0).unwrap();
        for j in 0..3 {
            sums[j] += s.beta[j];
        }
    }
    // conditional sd is at most 1/sqrt(200)
    for s in sums {
        assert!((s / reps as f64).abs() < 4.0 * (1.0 / 200f64).sqrt() / (reps as f64).sqrt());
    }
}

#[test]
fn flat_scales_reproduce_ols() {
    let data = linear_dataset(100, 0.5, &[2.0], 0.3, 5);
    let sampler = GibbsSampler::new(&data, config(0)).unwrap();
    let cp = sampler.cross_products();
    let n = cp.n as f64;
    let mx = cp.col_sums[0] / n;
    let my = cp.sum_y / n;
    let ols = (cp.xty[0] - n * mx * my) / (cp.xtx[(0, 0)] - n * mx * mx);
    let mut state = sampler.initial_state();
    state.scales = vec![1e8];
    state.sigma2 = 1.0;
    state.mu = my - ols * mx;
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let reps = 20_000;
    let mean = (0..reps)
        .map(|_| {
            let mut s = state.clone();
            sampler.draw_coefficients(&mut s, &mut rng, 0).unwrap();
            s.beta[0]
        })
        .sum::<f64>()
        / reps as f64;
    assert!((mean - ols).abs() < 1e-3, "{mean} vs {ols}");
}

#[test]
fn lambda2_conditional_is_gamma() {
    let data = linear_dataset(50, 0.0, &[0.1, 0.2], 1.0, 7);
    let cfg = SamplerConfig {
        hyper: Hyperprior { r: 1.0, delta: 1.0 },
        ..config(0)
    };
    let sampler = GibbsSampler::new(&data, cfg).unwrap();
    let mut state = sampler.initial_state();
    state.scales = vec![1.0, 1.0];
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            sampler.draw_lambda2(&mut state, &mut rng);
            state.lambda2
        })
        .collect();
    let (mean, _) = mean_sd(&draws);
    // Gamma(3, rate 2): mean 1.5, sd sqrt(3)/2
    let se = 3f64.sqrt() / 2.0 / (draws.len() as f64).sqrt();
    assert!((mean - 1.5).abs() < 3.0 * se, "{mean}");
    let g = Gamma::new(3.0, 2.0).unwrap();
    assert!(ks_test(&draws[..10_000], |x| g.cdf(x)).1 > 0.01);
}

#[test]
fn recovers_a_unit_slope() {
    let data = linear_dataset(500, 0.2, &[1.0], 0.1, 9);
    let draws = gibbs_fit(&data, &config(1)).unwrap();
    let m = draws.coef_means()[0];
    assert!((0.9..=1.1).contains(&m), "slope {m}");
    let mu = draws.mu.iter().sum::<f64>() / draws.n_draws() as f64;
    assert!((mu - 0.2).abs() < 0.03);
}

#[test]
fn fits_are_deterministic() {
    let data = linear_dataset(80, 0.0, &[0.5, -0.5, 0.0], 0.5, 10);
    let a = gibbs_fit(&data, &config(3)).unwrap();
    let b = gibbs_fit(&data, &config(3)).unwrap();
    assert_eq!(a, b);
    let c = gibbs_fit(&data, &config(4)).unwrap();
    assert_ne!(a, c);
    assert_eq!(a.n_draws(), 500);
}

#[test]
fn chains_merge_in_order() {
    let data = linear_dataset(60, 0.0, &[0.5], 0.5, 11);
    let cfg = SamplerConfig { n_keep: 50, ..config(5) };
    let merged = fit_chains(&data, &cfg, 3).unwrap();
    assert_eq!(merged.n_draws(), 150);
    assert_eq!(merged, fit_chains(&data, &cfg, 3).unwrap());
}

#[test]
fn invalid_inputs_are_rejected() {
    let data = linear_dataset(1, 0.0, &[0.5], 0.5, 12);
    assert!(matches!(gibbs_fit(&data, &config(0)), Err(Error::Empty(_))));
    let data = linear_dataset(10, 0.0, &[0.5], 0.5, 12);
    let bad = SamplerConfig { hyper: Hyperprior { r: 0.0, delta: 0.1 }, ..config(0) };
    assert!(gibbs_fit(&data, &bad).is_err());
    let bad = SamplerConfig { n_keep: 0, ..config(0) };
    assert!(gibbs_fit(&data, &bad).is_err());
    let data = data.with_response(vec![f64::NAN; 10]).unwrap();
    assert!(gibbs_fit(&data, &config(0)).is_err());
}

#[test]
fn diverging_state_reports_the_iteration() {
    let data = linear_dataset(20, 0.0, &[0.5], 0.5, 13);
    let sampler = GibbsSampler::new(&data, config(0)).unwrap();
    let mut state = sampler.initial_state();
    state.scales = vec![f64::NAN];
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let e = sampler.step(&mut state, &mut rng, 17).unwrap_err();
    assert!(e.is_numerical());
    assert!(e.to_string().contains("17"), "{e}");
}

#[test]
fn matches_quadrature_on_one_coefficient() {
    let (gm, gs, qm, qs) = quadrature_check();
    assert!((gm - qm).abs() <= (0.02 * qm.abs()).max(0.005), "mean {gm} vs {qm}");
    assert!((gs - qs).abs() <= (0.02 * qs).max(0.005), "sd {gs} vs {qs}");
}

#[test]
fn full_conditionals_match_closed_forms() {
    let results = conditional_ks_pvalues(6);
    assert!(results.iter().all(|r| r.1 > 0.01), "{results:?}");
}

#[test]
fn stronger_shrinkage_shrinks_more() {
    let data = linear_dataset(60, 0.0, &[0.3, -0.2, 0.1, 0.0, 0.25], 1.0, 16);
    let mean_abs = |l: f64| {
        let cfg = SamplerConfig { fixed_lambda2: Some(l), ..config(17) };
        let d = gibbs_fit(&data, &cfg).unwrap();
        d.coef_means().iter().map(|b| b.abs()).sum::<f64>()
    };
    let (a, b, c) = (mean_abs(0.1), mean_abs(10.0), mean_abs(1000.0));
    assert!(a > b && b > c, "{a} {b} {c}");
}

#[test]
fn column_permutation_permutes_summaries() {
    let data = linear_dataset(300, 0.1, &[0.6, -0.3, 0.0, 0.2], 0.5, 18);
    let perm = [2usize, 0, 3, 1];
    let rows = data
        .rows
        .iter()
        .map(|r| {
            let mut r: Vec<(usize, f64)> = r.iter().map(|&(j, v)| (perm.iter().position(|&q| q == j).unwrap(), v)).collect();
            r.sort_by_key(|e| e.0);
            r
        })
        .collect();
    let columns = perm.iter().map(|&j| data.columns[j].clone()).collect();
    let permuted = RegressionDataset::new(columns, 4, rows, data.y.clone()).unwrap();
    let cfg = SamplerConfig { n_keep: 4000, ..config(19) };
    let a = gibbs_fit(&data, &cfg).unwrap();
    let b = gibbs_fit(&permuted, &cfg).unwrap();
    for name in data.columns.iter() {
        let (ma, sa) = mean_sd(&a.column_by_name(name).unwrap());
        let (mb, _) = mean_sd(&b.column_by_name(name).unwrap());
        assert!((ma - mb).abs() < 0.1 * sa, "{name}: {ma} vs {mb}");
    }
}

fn negated(data: &RegressionDataset, flip_x: bool) -> RegressionDataset {
    let rows = data
        .rows
        .iter()
        .map(|r| r.iter().map(|&(j, v)| (j, if flip_x { -v } else { v })).collect())
        .collect();
    let y = data.y.iter().map(|v| -v).collect();
    RegressionDataset::new(data.columns.clone(), data.n_players, rows, y).unwrap()
}

#[test]
fn negating_the_response_negates_every_draw() {
    let data = linear_dataset(100, 0.2, &[0.5, -0.4, 0.1], 0.5, 20);
    let a = gibbs_fit(&data, &config(21)).unwrap();
    let b = gibbs_fit(&negated(&data, false), &config(21)).unwrap();
    for s in 0..a.n_draws() {
        assert_eq!(a.mu[s], -b.mu[s]);
        assert_eq!(a.sigma2[s], b.sigma2[s]);
        for (x, y) in a.draw(s).iter().zip(b.draw(s)) {
            assert_eq!(*x, -*y);
        }
    }
    // flipping the indicators too leaves the coefficients and negates mu
    let c = gibbs_fit(&negated(&data, true), &config(21)).unwrap();
    for s in 0..a.n_draws() {
        assert_eq!(a.mu[s], -c.mu[s]);
        assert_eq!(a.draw(s), c.draw(s));
    }
}

#[test]
fn scaling_the_response_scales_every_draw() {
    let data = linear_dataset(100, 0.2, &[0.5, -0.4, 0.1], 0.5, 22);
    let a = gibbs_fit(&data, &config(23)).unwrap();
    for c in [0.25, 8.0] {
        let scaled = data.with_response(data.y.iter().map(|v| v * c).collect()).unwrap();
        let b = gibbs_fit(&scaled, &config(23)).unwrap();
        for s in 0..a.n_draws() {
            assert_eq!(a.mu[s] * c, b.mu[s]);
            assert_eq!(a.sigma2[s] * c * c, b.sigma2[s]);
            for (x, y) in a.draw(s).iter().zip(b.draw(s)) {
                assert_eq!(x * c, *y);
            }
        }
    }
}
