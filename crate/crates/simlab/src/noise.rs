use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    /// Exponential moments of every order below 2.
    #[default]
    Gaussian,
    /// Heavier tails; exponential moments only of order 1.
    Laplace,
}

/// Additive noise `σ_ε · ε` with `ε` of unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(default)]
    pub family: NoiseFamily,
    pub sigma: f64,
}

impl NoiseSpec {
    pub fn gaussian(sigma: f64) -> Self {
        Self {
            family: NoiseFamily::Gaussian,
            sigma,
        }
    }

    pub fn laplace(sigma: f64) -> Self {
        Self {
            family: NoiseFamily::Laplace,
            sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(SimError::Validation(format!(
                "noise sigma must be finite and nonnegative, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Unit-variance draw.
    pub fn standard<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            NoiseFamily::Gaussian => StandardNormal.sample(rng),
            NoiseFamily::Laplace => {
                let e: f64 = Exp1.sample(rng);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * e / std::f64::consts::SQRT_2
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sigma * self.standard(rng)
    }
}
