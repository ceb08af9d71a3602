use std::sync::Arc;

use funrec::{Curve64, Grid64};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessKind {
    /// Independent scaled Brownian paths started at 0.
    IidBrownianLike,
    /// `X_t = ρ X_{t−1} + B_t` with independent Brownian-bridge innovations
    /// `B_t`, started from its stationary law. Geometrically mixing.
    FunctionalAr1 { rho_ar: f64 },
    /// Constant curves at independent Uniform(0, 1) levels on the grid {0, 1}.
    ScalarUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    #[serde(flatten)]
    pub kind: ProcessKind,
    /// Number of equispaced grid points on [0, 1]; ignored by `ScalarUniform`.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_scale")]
    pub innovation_scale: f64,
}

fn default_grid_points() -> usize {
    101
}

fn default_scale() -> f64 {
    1.0
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind) -> Self {
        Self {
            kind,
            grid_points: default_grid_points(),
            innovation_scale: default_scale(),
        }
    }

    pub fn scalar_uniform() -> Self {
        Self::new(ProcessKind::ScalarUniform)
    }

    pub fn validate(&self) -> Result<()> {
        if let ProcessKind::FunctionalAr1 { rho_ar } = self.kind {
            if !(rho_ar > 0.0 && rho_ar < 1.0) {
                return Err(SimError::Validation(format!(
                    "rho_ar must lie in (0, 1), got {rho_ar}"
                )));
            }
        }
        if self.kind != ProcessKind::ScalarUniform && self.grid_points < 2 {
            return Err(SimError::Validation(
                "grid_points must be at least 2".into(),
            ));
        }
        if !(self.innovation_scale > 0.0 && self.innovation_scale.is_finite()) {
            return Err(SimError::Validation(
                "innovation_scale must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<Grid64>> {
        let g = match self.kind {
            ProcessKind::ScalarUniform => Grid64::new(vec![0.0, 1.0])?,
            _ => Grid64::uniform(self.grid_points)?,
        };
        Ok(Arc::new(g))
    }
}

/// Sequential sampler; holds the AR state between draws.
#[derive(Debug, Clone)]
pub(crate) struct ProcessSampler {
    spec: ProcessSpec,
    grid: Arc<Grid64>,
    state: Option<Vec<f64>>,
}

impl ProcessSampler {
    pub fn new(spec: ProcessSpec, grid: Arc<Grid64>) -> Self {
        Self {
            spec,
            grid,
            state: None,
        }
    }

    fn brownian<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let pts = self.grid.points();
        let mut w = Vec::with_capacity(pts.len());
        w.push(0.0);
        for k in 1..pts.len() {
            let z: f64 = StandardNormal.sample(rng);
            w.push(w[k - 1] + z * (pts[k] - pts[k - 1]).sqrt());
        }
        w
    }

    fn bridge<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let pts = self.grid.points();
        let w = self.brownian(rng);
        let (t0, span) = (pts[0], pts[pts.len() - 1] - pts[0]);
        let end = w[w.len() - 1];
        w.iter()
            .zip(pts)
            .map(|(&wk, &t)| wk - (t - t0) / span * end)
            .collect()
    }

    pub fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Curve64> {
        let scale = self.spec.innovation_scale;
        let values = match self.spec.kind {
            ProcessKind::ScalarUniform => {
                let u: f64 = rng.random();
                vec![u, u]
            }
            ProcessKind::IidBrownianLike => {
                self.brownian(rng).into_iter().map(|v| scale * v).collect()
            }
            ProcessKind::FunctionalAr1 { rho_ar } => {
                let innov = self.bridge(rng);
                let next: Vec<f64> = match &self.state {
                    None => {
                        let s = scale / (1.0 - rho_ar * rho_ar).sqrt();
                        innov.iter().map(|v| s * v).collect()
                    }
                    Some(prev) => prev
                        .iter()
                        .zip(&innov)
                        .map(|(p, e)| rho_ar * p + scale * e)
                        .collect(),
                };
                self.state = Some(next.clone());
                next
            }
        };
        Ok(Curve64::new(self.grid.clone(), values)?)
    }
}
