use std::collections::HashMap;

use crate::error::{Error, Result};

/// Retained Gibbs samples of `(mu, sigma2, coefficients)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    names: Vec<String>,
    index: HashMap<String, usize>,
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// Row-major, one row of `names.len()` coefficients per draw.
    coefs: Vec<f64>,
    /// Shrinkage trace; empty when the draws were read back from a file.
    pub lambda2: Vec<f64>,
}

impl PosteriorDraws {
    pub fn new(names: Vec<String>, mu: Vec<f64>, sigma2: Vec<f64>, coefs: Vec<f64>, lambda2: Vec<f64>) -> Result<Self> {
        let s = mu.len();
        if sigma2.len() != s || coefs.len() != s * names.len() || !(lambda2.is_empty() || lambda2.len() == s) {
            return Err(Error::InvalidArgument("posterior draw arrays have inconsistent lengths".into()));
        }
        let index: HashMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        if index.len() != names.len() {
            return Err(Error::InvalidArgument("duplicate coefficient names".into()));
        }
        Ok(PosteriorDraws {
            names,
            index,
            mu,
            sigma2,
            coefs,
            lambda2,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_draws(&self) -> usize {
        self.mu.len()
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownCoefficient(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// All coefficients of draw `s`.
    pub fn draw(&self, s: usize) -> &[f64] {
        let p = self.p();
        &self.coefs[s * p..(s + 1) * p]
    }

    /// Samples of coefficient `j` across draws.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_draws()).map(|s| self.coefs[s * self.p() + j]).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Result<Vec<f64>> {
        Ok(self.column(self.index_of(name)?))
    }

    /// Posterior mean of every coefficient.
    pub fn coef_means(&self) -> Vec<f64> {
        let p = self.p();
        let mut m = vec![0.0; p];
        for s in 0..self.n_draws() {
            for (acc, v) in m.iter_mut().zip(self.draw(s)) {
                *acc += v;
            }
        }
        let n = self.n_draws() as f64;
        m.iter_mut().for_each(|x| *x /= n);
        m
    }

    /// Concatenate draws from chains over the same coefficients.
    pub fn merge(chains: Vec<PosteriorDraws>) -> Result<PosteriorDraws> {
        let mut it = chains.into_iter();
        let mut out = it.next().ok_or_else(|| Error::Empty("no chains to merge".into()))?;
        for c in it {
            if c.names != out.names {
                return Err(Error::InvalidArgument("chains have different coefficients".into()));
            }
            if out.lambda2.is_empty() != c.lambda2.is_empty() {
                out.lambda2.clear();
            } else {
                out.lambda2.extend(c.lambda2);
            }
            out.mu.extend(c.mu);
            out.sigma2.extend(c.sigma2);
            out.coefs.extend(c.coefs);
        }
        Ok(out)
    }
}
