use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::funcore::Curve;
use crate::{Error, Result, Scalar};

use super::state::{PointSums, RecursiveEstimator};
use super::EstimatorConfig;

const FORMAT: &str = "funrec-state";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSumsRecord<T> {
    pub num: T,
    pub den: T,
}

/// Serializable estimator state. Evaluation points are not stored, only
/// their hash; [`restore`](StateSnapshot::restore) takes them back from the
/// caller together with the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot<T> {
    pub format: String,
    pub version: u32,
    pub config_hash: String,
    pub points_hash: String,
    pub n: u64,
    pub norm: T,
    pub digest: u64,
    pub points: Vec<PointSumsRecord<T>>,
}

fn points_hash<T: Scalar>(points: &[Curve<T>]) -> String {
    let mut h = Sha256::new();
    if let Some(first) = points.first() {
        for t in first.grid().points() {
            h.update(t.as_f64().to_le_bytes());
        }
    }
    for p in points {
        h.update(b"|");
        for v in p.values() {
            h.update(v.as_f64().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

impl<T: Scalar> StateSnapshot<T> {
    pub fn capture(est: &RecursiveEstimator<T>) -> Self {
        let points = (0..est.len())
            .map(|j| {
                let s = est.sums(j).expect("index in range");
                PointSumsRecord {
                    num: s.num,
                    den: s.den,
                }
            })
            .collect();
        Self {
            format: FORMAT.to_string(),
            version: VERSION,
            config_hash: est.config().config_hash(),
            points_hash: points_hash(est.points()),
            n: est.n(),
            norm: est.norm(),
            digest: est.digest(),
            points,
        }
    }

    /// Rebuilds the estimator; fails unless `config` and `points` are the
    /// ones the snapshot was taken with.
    pub fn restore(
        &self,
        config: EstimatorConfig<T>,
        points: Vec<Curve<T>>,
    ) -> Result<RecursiveEstimator<T>> {
        if self.format != FORMAT || self.version != VERSION {
            return Err(Error::validation(format!(
                "unsupported snapshot format {} v{}",
                self.format, self.version
            )));
        }
        config.validate()?;
        if config.config_hash() != self.config_hash {
            return Err(Error::validation(
                "snapshot was taken with a different config",
            ));
        }
        if points.len() != self.points.len() || points_hash(&points) != self.points_hash {
            return Err(Error::structural(
                "snapshot was taken with different evaluation points",
            ));
        }
        if !self.norm.is_finite()
            || self.norm < T::zero()
            || (self.n == 0) != (self.norm == T::zero())
        {
            return Err(Error::validation(
                "snapshot normalizer is inconsistent with n",
            ));
        }
        // Validates the point set and grids the same way a fresh run would.
        RecursiveEstimator::register_points(config.clone(), points.clone())?;
        let sums = self
            .points
            .iter()
            .map(|r| PointSums {
                num: r.num,
                den: r.den,
            })
            .collect();
        Ok(RecursiveEstimator::from_parts(
            config,
            points,
            sums,
            self.norm,
            self.n,
            self.digest,
        ))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::{BandwidthSchedule, Grid, Kernel, SemiNorm, SmallBallModel};

    fn setup() -> (EstimatorConfig<f64>, Vec<Curve<f64>>, Arc<Grid<f64>>) {
        let g = Arc::new(Grid::<f64>::uniform(11).unwrap());
        let cfg = EstimatorConfig::new(
            0.4,
            Kernel::Uniform,
            SemiNorm::L2,
            BandwidthSchedule::new(0.8, 0.2).unwrap(),
            SmallBallModel::power_law(1.0, 2.0).unwrap(),
        )
        .unwrap();
        let pts = vec![
            Curve::constant(g.clone(), 0.0).unwrap(),
            Curve::from_fn(g.clone(), |t| 0.3 * t).unwrap(),
        ];
        (cfg, pts, g)
    }

    fn obs(g: &Arc<Grid<f64>>, k: usize) -> (Curve<f64>, f64) {
        let a = ((k as f64) * 0.618_033_988_75).fract() - 0.5;
        let x = Curve::from_fn(g.clone(), |t| a * t).unwrap();
        (x, a.sin() + 0.01 * k as f64)
    }

    #[test]
    fn resume_is_bitwise_identical() {
        let (cfg, pts, g) = setup();
        let mut full = RecursiveEstimator::register_points(cfg.clone(), pts.clone()).unwrap();
        let mut first = RecursiveEstimator::register_points(cfg.clone(), pts.clone()).unwrap();
        for k in 0..300 {
            let (x, y) = obs(&g, k);
            full.update(&x, y).unwrap();
            if k < 137 {
                first.update(&x, y).unwrap();
            }
        }
        let json = StateSnapshot::capture(&first).to_json().unwrap();
        let mut resumed = StateSnapshot::<f64>::from_json(&json)
            .unwrap()
            .restore(cfg, pts)
            .unwrap();
        for k in 137..300 {
            let (x, y) = obs(&g, k);
            resumed.update(&x, y).unwrap();
        }
        assert_eq!(
            StateSnapshot::capture(&resumed),
            StateSnapshot::capture(&full)
        );
        for j in 0..2 {
            assert_eq!(resumed.evaluate(j).unwrap(), full.evaluate(j).unwrap());
        }
    }

    #[test]
    fn restore_rejects_mismatches() {
        let (cfg, pts, g) = setup();
        let mut est = RecursiveEstimator::register_points(cfg.clone(), pts.clone()).unwrap();
        let (x, y) = obs(&g, 3);
        est.update(&x, y).unwrap();
        let snap = StateSnapshot::capture(&est);

        let mut other = cfg.clone();
        other.ell = 0.5;
        assert!(snap.restore(other, pts.clone()).is_err());
        assert!(snap.restore(cfg.clone(), pts[..1].to_vec()).is_err());
        let mut bad = snap.clone();
        bad.version = 99;
        assert!(bad.restore(cfg.clone(), pts.clone()).is_err());
        let mut bad = snap.clone();
        bad.norm = 0.0;
        assert!(bad.restore(cfg.clone(), pts.clone()).is_err());
        assert!(snap.restore(cfg, pts).is_ok());
    }
}
