use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymconst::BandwidthSchedule;
use crate::funcore::{Kernel, SemiNorm};
use crate::smallball::SmallBallModel;
use crate::{Error, Result, Scalar};

/// Response truncation `Y·1{|Y| ≤ b_i}` with `b_i = (δ ln i)^{1/μ}`.
///
/// `ln i` is floored at `ln 2` so the first threshold is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation<T> {
    pub delta: T,
    pub mu: T,
}

impl<T: Scalar> Default for Truncation<T> {
    fn default() -> Self {
        Self {
            delta: T::one(),
            mu: T::one(),
        }
    }
}

impl<T: Scalar> Truncation<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > T::zero()) {
            return Err(Error::validation("truncation delta must be positive"));
        }
        if !(self.mu > T::zero() && self.mu.is_finite()) {
            return Err(Error::validation("truncation mu must be positive"));
        }
        Ok(())
    }

    pub fn threshold(&self, i: u64) -> T {
        let log_i = T::from_count(i.max(2)).ln();
        (self.delta * log_i).powf(T::one() / self.mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct EstimatorConfig<T> {
    pub ell: T,
    pub kernel: Kernel<T>,
    pub seminorm: SemiNorm,
    pub schedule: BandwidthSchedule<T>,
    pub smallball: SmallBallModel<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation<T>>,
}

impl<T: Scalar> EstimatorConfig<T> {
    pub fn new(
        ell: T,
        kernel: Kernel<T>,
        seminorm: SemiNorm,
        schedule: BandwidthSchedule<T>,
        smallball: SmallBallModel<T>,
    ) -> Result<Self> {
        let cfg = Self {
            ell,
            kernel,
            seminorm,
            schedule,
            smallball,
            truncation: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_truncation(mut self, t: Truncation<T>) -> Result<Self> {
        t.validate()?;
        self.truncation = Some(t);
        Ok(self)
    }

    pub fn without_truncation(&self) -> Self {
        Self {
            truncation: None,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ell >= T::zero() && self.ell <= T::one()) {
            return Err(Error::validation(format!(
                "ell must lie in [0, 1], got {}",
                self.ell
            )));
        }
        self.kernel.validate()?;
        if !self.kernel.is_admissible() {
            return Err(Error::validation(
                "kernel must be bounded away from zero on [0, 1] for estimation",
            ));
        }
        self.schedule.validate()?;
        self.smallball.validate()?;
        if let Some(t) = &self.truncation {
            t.validate()?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the JSON form; identifies the config in snapshots.
    pub fn config_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> EstimatorConfig<f64> {
        EstimatorConfig::new(
            0.5,
            Kernel::Uniform,
            SemiNorm::L2,
            BandwidthSchedule::new(0.4, 0.2).unwrap(),
            SmallBallModel::power_law(1.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let mut c = base();
        c.ell = 1.2;
        assert!(c.validate().is_err());
        let mut c = base();
        c.kernel = Kernel::Quadratic;
        assert!(c.validate().is_err());
        assert!(base()
            .with_truncation(Truncation {
                delta: 0.0,
                mu: 1.0
            })
            .is_err());
        assert!(base()
            .with_truncation(Truncation {
                delta: 1.0,
                mu: -1.0
            })
            .is_err());
    }

    #[test]
    fn threshold_values() {
        let t = Truncation::<f64>::default();
        assert!((t.threshold(1) - 2f64.ln()).abs() < 1e-15);
        assert!((t.threshold(100) - 100f64.ln()).abs() < 1e-15);
        let t2 = Truncation {
            delta: 2.0,
            mu: 2.0,
        };
        assert!((t2.threshold(50) - (2.0 * 50f64.ln()).sqrt()).abs() < 1e-15);
        let inf = Truncation {
            delta: f64::INFINITY,
            mu: 1.0,
        };
        assert!(inf.validate().is_ok());
        assert_eq!(inf.threshold(1), f64::INFINITY);
    }

    #[test]
    fn hash_tracks_content() {
        let a = base();
        let mut b = base();
        assert_eq!(a.config_hash(), b.config_hash());
        b.ell = 0.25;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn json_roundtrip() {
        let c = base().with_truncation(Truncation::default()).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: EstimatorConfig<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
