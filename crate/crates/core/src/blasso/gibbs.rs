use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use super::{InverseGaussian, PosteriorDraws, SamplerConfig};
use crate::error::{Error, Result};
use crate::pbp::RegressionDataset;
use crate::seed;

/// Smallest `beta_j^2` fed to the latent-scale update.
const MIN_BETA_SQ: f64 = 1e-24;

/// Cross-products accumulated once from the sparse design.
#[derive(Debug, Clone)]
pub struct CrossProducts {
    pub xtx: DMatrix<f64>,
    pub xty: DVector<f64>,
    /// `X' 1`, needed because the intercept is sampled separately.
    pub col_sums: DVector<f64>,
    pub sum_y: f64,
    pub n: usize,
}

impl CrossProducts {
    pub fn from_dataset(data: &RegressionDataset) -> Self {
        let p = data.p();
        let mut xtx = DMatrix::<f64>::zeros(p, p);
        let mut xty = DVector::<f64>::zeros(p);
        let mut col_sums = DVector::<f64>::zeros(p);
        for (row, &y) in data.rows.iter().zip(&data.y) {
            for &(j, v) in row {
                xty[j] += v * y;
                col_sums[j] += v;
                for &(k, w) in row {
                    xtx[(j, k)] += v * w;
                }
            }
        }
        CrossProducts {
            xtx,
            xty,
            col_sums,
            sum_y: data.y.iter().sum(),
            n: data.n(),
        }
    }
}

/// Current values of every sampled quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    pub mu: f64,
    /// Player coefficients followed by team coefficients.
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub lambda2: f64,
    /// Latent prior variance scale `s2_j` of each coefficient.
    pub scales: Vec<f64>,
}

fn sign_of_first_nonzero<'a>(xs: impl IntoIterator<Item = &'a f64>) -> f64 {
    xs.into_iter()
        .find(|x| **x != 0.0)
        .map(|x| x.signum())
        .unwrap_or(1.0)
}

/// Gibbs sampler over a fixed dataset.
///
/// The standard normal noise of the intercept and coefficient updates is
/// multiplied by fixed data-derived signs (of `sum(y)` and of the first
/// nonzero entry of `X'y`). Those signs do not depend on the random stream,
/// so the conditionals are unchanged, and a reflected dataset with the same
/// seed yields the exactly reflected chain.
pub struct GibbsSampler<'a> {
    data: &'a RegressionDataset,
    cross: CrossProducts,
    config: SamplerConfig,
    mu_orient: f64,
    beta_orient: f64,
}

impl<'a> GibbsSampler<'a> {
    pub fn new(data: &'a RegressionDataset, config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        if data.n() < 2 {
            return Err(Error::Empty(format!("need at least two rows, got {}", data.n())));
        }
        if data.p() == 0 {
            return Err(Error::Empty("dataset has no coefficients".into()));
        }
        if data.y.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidArgument("non-finite response".into()));
        }
        let cross = CrossProducts::from_dataset(data);
        let mu_orient = if cross.sum_y != 0.0 {
            cross.sum_y.signum()
        } else {
            sign_of_first_nonzero(&data.y)
        };
        let beta_orient = sign_of_first_nonzero(cross.xty.iter());
        Ok(GibbsSampler {
            data,
            cross,
            config,
            mu_orient,
            beta_orient,
        })
    }

    pub fn cross_products(&self) -> &CrossProducts {
        &self.cross
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    /// Starting point: sample mean and variance of `y`, zero coefficients,
    /// unit latent scales.
    pub fn initial_state(&self) -> GibbsState {
        let n = self.cross.n as f64;
        let mean = self.cross.sum_y / n;
        let var = self.data.y.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / (n - 1.0);
        let p = self.data.p();
        GibbsState {
            mu: mean,
            beta: vec![0.0; p],
            sigma2: if var > 0.0 { var } else { 1.0 },
            lambda2: self.config.fixed_lambda2.unwrap_or(1.0),
            scales: vec![1.0; p],
        }
    }

    /// Sum of squared residuals `||y - mu - X beta||^2`.
    pub fn rss(&self, state: &GibbsState) -> f64 {
        self.data
            .rows
            .iter()
            .zip(&self.data.y)
            .map(|(row, y)| {
                let fit = state.mu + row.iter().map(|&(j, v)| v * state.beta[j]).sum::<f64>();
                (y - fit) * (y - fit)
            })
            .sum()
    }

    /// `beta | rest ~ N(A^-1 X'(y - mu), sigma2 A^-1)` with `A = X'X + diag(1/s2)`.
    pub fn draw_coefficients<R: Rng + ?Sized>(&self, state: &mut GibbsState, rng: &mut R, iteration: usize) -> Result<()> {
        let p = state.beta.len();
        let mut a = self.cross.xtx.clone();
        for j in 0..p {
            a[(j, j)] += 1.0 / state.scales[j];
        }
        let b = &self.cross.xty - &self.cross.col_sums * state.mu;
        let chol = Cholesky::new(a).ok_or(Error::Cholesky { iteration })?;
        let mean = chol.solve(&b);
        let z = DVector::<f64>::from_fn(p, |_, _| self.beta_orient * rng.sample::<f64, _>(StandardNormal));
        let noise = chol
            .l_dirty()
            .tr_solve_lower_triangular(&z)
            .ok_or(Error::Cholesky { iteration })?;
        let sd = state.sigma2.sqrt();
        for j in 0..p {
            state.beta[j] = mean[j] + sd * noise[j];
        }
        Ok(())
    }

    /// `mu | rest ~ N(mean(y - X beta), sigma2 / n)` under the flat prior.
    pub fn draw_intercept<R: Rng + ?Sized>(&self, state: &mut GibbsState, rng: &mut R) {
        let n = self.cross.n as f64;
        let fitted: f64 = self.cross.col_sums.iter().zip(&state.beta).map(|(c, b)| c * b).sum();
        let mean = (self.cross.sum_y - fitted) / n;
        let z: f64 = rng.sample(StandardNormal);
        state.mu = mean + (state.sigma2 / n).sqrt() * self.mu_orient * z;
    }

    /// `sigma2 | rest ~ InvGamma((n + p) / 2, (RSS + sum beta_j^2 / s2_j) / 2)`.
    pub fn draw_sigma2<R: Rng + ?Sized>(&self, state: &mut GibbsState, rng: &mut R) {
        let (shape, scale) = self.sigma2_conditional(state);
        let g: f64 = Gamma::new(shape, 1.0).expect("positive shape").sample(rng);
        state.sigma2 = scale / g;
    }

    /// Shape and scale of the inverse-gamma `sigma2` conditional.
    pub fn sigma2_conditional(&self, state: &GibbsState) -> (f64, f64) {
        let penalty: f64 = state.beta.iter().zip(&state.scales).map(|(b, s)| b * b / s).sum();
        let shape = (self.cross.n + state.beta.len()) as f64 / 2.0;
        (shape, (self.rss(state) + penalty) / 2.0)
    }

    /// `1/s2_j | rest ~ InverseGaussian(sqrt(lambda2 sigma2 / beta_j^2), lambda2)`.
    pub fn draw_scales<R: Rng + ?Sized>(&self, state: &mut GibbsState, rng: &mut R) -> Result<()> {
        for j in 0..state.beta.len() {
            let b2 = (state.beta[j] * state.beta[j]).max(MIN_BETA_SQ);
            let ig = InverseGaussian::new((state.lambda2 * state.sigma2 / b2).sqrt(), state.lambda2)?;
            state.scales[j] = 1.0 / ig.sample(rng);
        }
        Ok(())
    }

    /// `lambda2 | rest ~ Gamma(p + r, delta + sum s2_j / 2)` (shape, rate).
    pub fn draw_lambda2<R: Rng + ?Sized>(&self, state: &mut GibbsState, rng: &mut R) {
        if let Some(fixed) = self.config.fixed_lambda2 {
            state.lambda2 = fixed;
            return;
        }
        let shape = state.scales.len() as f64 + self.config.hyper.r;
        let rate = self.config.hyper.delta + state.scales.iter().sum::<f64>() / 2.0;
        let g: f64 = Gamma::new(shape, 1.0).expect("positive shape").sample(rng);
        state.lambda2 = g / rate;
    }

    /// One full sweep: coefficients, intercept, noise variance, latent
    /// scales, shrinkage.
    pub fn step<R: Rng + ?Sized>(&self, state: &mut GibbsState, rng: &mut R, iteration: usize) -> Result<()> {
        self.draw_coefficients(state, rng, iteration)?;
        self.draw_intercept(state, rng);
        self.draw_sigma2(state, rng);
        self.draw_scales(state, rng)
            .map_err(|_| Error::Divergence { iteration, what: "latent scale parameters" })?;
        self.draw_lambda2(state, rng);
        check_finite(state, iteration)
    }
}

fn check_finite(state: &GibbsState, iteration: usize) -> Result<()> {
    let bad = |what| Err(Error::Divergence { iteration, what });
    if !state.mu.is_finite() {
        return bad("mu");
    }
    if !(state.sigma2.is_finite() && state.sigma2 > 0.0) {
        return bad("sigma2");
    }
    if !(state.lambda2.is_finite() && state.lambda2 > 0.0) {
        return bad("lambda2");
    }
    if state.beta.iter().any(|b| !b.is_finite()) {
        return bad("coefficients");
    }
    if state.scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return bad("latent scales");
    }
    Ok(())
}

/// One sweep of the sampler (see [`GibbsSampler::step`]).
pub fn gibbs_step<R: Rng + ?Sized>(
    sampler: &GibbsSampler<'_>,
    state: &mut GibbsState,
    rng: &mut R,
    iteration: usize,
) -> Result<()> {
    sampler.step(state, rng, iteration)
}

/// Run one chain: `burn_in` discarded sweeps, then every `thin`-th state
/// until `n_keep` are retained. Deterministic for a given seed.
pub fn gibbs_fit(data: &RegressionDataset, config: &SamplerConfig) -> Result<PosteriorDraws> {
    let sampler = GibbsSampler::new(data, *config)?;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut state = sampler.initial_state();
    let p = data.p();
    let mut mu = Vec::with_capacity(config.n_keep);
    let mut sigma2 = Vec::with_capacity(config.n_keep);
    let mut lambda2 = Vec::with_capacity(config.n_keep);
    let mut coefs = Vec::with_capacity(config.n_keep * p);

    let total = config.burn_in + config.n_keep * config.thin;
    for it in 0..total {
        sampler.step(&mut state, &mut rng, it)?;
        if it >= config.burn_in && (it - config.burn_in + 1) % config.thin == 0 {
            mu.push(state.mu);
            sigma2.push(state.sigma2);
            lambda2.push(state.lambda2);
            coefs.extend_from_slice(&state.beta);
        }
    }
    PosteriorDraws::new(data.columns.clone(), mu, sigma2, coefs, lambda2)
}

/// Independent chains with seeds derived from `config.seed`, run in
/// parallel and concatenated in chain order.
pub fn fit_chains(data: &RegressionDataset, config: &SamplerConfig, n_chains: usize) -> Result<PosteriorDraws> {
    let chains = (0..n_chains)
        .into_par_iter()
        .map(|c| {
            let cfg = SamplerConfig {
                seed: seed::derive_indexed(config.seed, "chain", c as u64),
                ..*config
            };
            gibbs_fit(data, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    PosteriorDraws::merge(chains)
}
