//! Inverse-Gaussian variates by transformation with rejection
//! (Michael, Schucany and Haas).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGaussian {
    mean: f64,
    shape: f64,
}

impl InverseGaussian {
    pub fn new(mean: f64, shape: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::InvalidArgument(format!("inverse-Gaussian mean {mean}")));
        }
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::InvalidArgument(format!("inverse-Gaussian shape {shape}")));
        }
        Ok(InverseGaussian { mean, shape })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }
}

impl Distribution<f64> for InverseGaussian {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (m, s) = (self.mean, self.shape);
        let v: f64 = rng.sample(StandardNormal);
        let y = m * v * v;
        // Smaller root of the chi-square transform. The textbook form
        // m + m/(2s) * (y - sqrt(4sy + y^2)) cancels catastrophically when
        // y >> s; this rearrangement is exact algebra without the subtraction.
        let root = y + (y * y + 4.0 * s * y).sqrt();
        let x = if y > 0.0 { m * (4.0 * s * y) / (root * root) } else { m };
        let u: f64 = rng.random();
        if u * (m + x) <= m {
            x
        } else {
            m * (m / x)
        }
    }
}

/// One inverse-Gaussian draw with the given mean and shape.
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> Result<f64> {
    Ok(InverseGaussian::new(mean, shape)?.sample(rng))
}
