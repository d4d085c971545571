//! Bayesian lasso regression of shift responses on signed indicators.
//!
//! The model is `y_i ~ N(mu + x_i' beta, sigma2)` with a flat prior on `mu`,
//! `1 / sigma2` on `sigma2`, independent Laplace priors with rate
//! `lambda / sigma` on every player and team coefficient, and
//! `lambda2 ~ Gamma(r, delta)` (shape, rate). Sampling uses the normal
//! scale-mixture form of the Laplace prior:
//! `beta_j | sigma2, s2_j ~ N(0, sigma2 * s2_j)`, `s2_j ~ Exp(lambda2 / 2)`.
//!
//! Writing the prior density as `exp(-lambda' / (2 sigma) * |beta_j|)`
//! instead gives `lambda = lambda' / 2`; only the reading of `lambda`
//! changes.

mod draws;
mod gibbs;
mod ig;

pub use draws::PosteriorDraws;
pub use gibbs::{fit_chains, gibbs_fit, gibbs_step, CrossProducts, GibbsSampler, GibbsState};
pub use ig::{sample_inverse_gaussian, InverseGaussian};

use crate::error::{Error, Result};

/// `lambda2 ~ Gamma(shape = r, rate = delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperprior {
    pub r: f64,
    pub delta: f64,
}

impl Default for Hyperprior {
    fn default() -> Self {
        Hyperprior { r: 2.0, delta: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub n_keep: usize,
    pub seed: u64,
    pub hyper: Hyperprior,
    /// Hold `lambda2` at this value instead of sampling it.
    pub fixed_lambda2: Option<f64>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burn_in: 2000,
            thin: 10,
            n_keep: 1000,
            seed: 0,
            hyper: Hyperprior::default(),
            fixed_lambda2: None,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hyper.r > 0.0 && self.hyper.r.is_finite()) {
            return Err(Error::InvalidArgument(format!("hyperprior r = {}", self.hyper.r)));
        }
        if !(self.hyper.delta > 0.0 && self.hyper.delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("hyperprior delta = {}", self.hyper.delta)));
        }
        if self.n_keep == 0 {
            return Err(Error::InvalidArgument("n_keep must be at least 1".into()));
        }
        if self.thin == 0 {
            return Err(Error::InvalidArgument("thin must be at least 1".into()));
        }
        if let Some(l) = self.fixed_lambda2 {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidArgument(format!("fixed lambda2 = {l}")));
            }
        }
        Ok(())
    }
}
