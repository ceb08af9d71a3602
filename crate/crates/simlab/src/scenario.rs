use std::fs;
use std::path::Path;
use std::sync::Arc;

use funrec::smallball::scalar_reference_model;
use funrec::{Curve64, Dataset64, Grid64, Observation64, SmallBallModel64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::process::ProcessSampler;
use crate::{
    splitmix64, NoiseSpec, ProcessKind, ProcessSpec, RegressionOperator, Result, SimError,
};

pub const SCHEMA_VERSION: u32 = 1;

const COVARIATE_STREAM: u64 = 0x5851_f42d_4c95_7f2d;
const NOISE_STREAM: u64 = 0x1405_7b7e_f767_814f;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuerySpec {
    /// Constant curves at the given levels.
    Levels { levels: Vec<f64> },
    /// The zero curve.
    Zero,
    /// Explicit curves on the process grid.
    Curves { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(default = "default_label")]
    pub label: String,
    pub process: ProcessSpec,
    pub operator: RegressionOperator,
    pub noise: NoiseSpec,
    pub query: QuerySpec,
    pub seed: u64,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_label() -> String {
    "constructed".to_string()
}

/// Closed-form quantities available for the scalar-uniform process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticTruth {
    pub r_chi: f64,
    pub zeta_prime: f64,
    pub f1: f64,
    pub gamma: f64,
    pub sigma2_eps: f64,
    /// Radius up to which `F(h) = f1 · h^γ` holds exactly.
    pub valid_up_to: f64,
}

impl Scenario {
    pub fn new(
        process: ProcessSpec,
        operator: RegressionOperator,
        noise: NoiseSpec,
        query: QuerySpec,
        seed: u64,
    ) -> Result<Self> {
        let s = Self {
            schema_version: SCHEMA_VERSION,
            label: default_label(),
            process,
            operator,
            noise,
            query,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SimError::Validation(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.process.validate()?;
        self.noise.validate()?;
        let grid = self.grid()?;
        let points = self.query_points(&grid)?;
        if points.is_empty() {
            return Err(SimError::Validation(
                "at least one query point is required".into(),
            ));
        }
        if self.process.kind == ProcessKind::ScalarUniform {
            if let QuerySpec::Levels { levels } = &self.query {
                if let Some(u) = levels.iter().find(|u| !(**u > 0.0 && **u < 1.0)) {
                    return Err(SimError::Validation(format!(
                        "scalar-uniform query levels must lie in (0, 1), got {u}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(s)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn with_noise(&self, noise: NoiseSpec) -> Self {
        Self {
            noise,
            ..self.clone()
        }
    }

    pub fn grid(&self) -> Result<Arc<Grid64>> {
        self.process.grid()
    }

    /// Query curves on `grid`, which should come from [`grid`](Self::grid) so
    /// that streams and points share one allocation.
    pub fn query_points(&self, grid: &Arc<Grid64>) -> Result<Vec<Curve64>> {
        let pts = match &self.query {
            QuerySpec::Levels { levels } => levels
                .iter()
                .map(|&u| Curve64::constant(grid.clone(), u))
                .collect::<funrec::Result<_>>()?,
            QuerySpec::Zero => vec![Curve64::constant(grid.clone(), 0.0)?],
            QuerySpec::Curves { values } => values
                .iter()
                .map(|v| Curve64::new(grid.clone(), v.clone()))
                .collect::<funrec::Result<_>>()?,
        };
        Ok(pts)
    }

    /// Unbounded observation stream. Covariates and noise use separate
    /// generators, so two scenarios that differ only in `noise` share the
    /// covariates and the standardized noise draws.
    pub fn stream(&self) -> Result<ScenarioStream> {
        self.stream_on(self.grid()?)
    }

    pub fn stream_on(&self, grid: Arc<Grid64>) -> Result<ScenarioStream> {
        Ok(ScenarioStream {
            sampler: ProcessSampler::new(self.process, grid),
            x_rng: ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ COVARIATE_STREAM)),
            noise_rng: ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ NOISE_STREAM)),
            operator: self.operator,
            noise: self.noise,
        })
    }

    /// The first `n` observations of [`stream`](Self::stream).
    pub fn generate(&self, n: usize) -> Result<Dataset64> {
        let grid = self.grid()?;
        let mut stream = self.stream_on(grid.clone())?;
        let mut data = Dataset64::new(grid);
        for _ in 0..n {
            let obs = stream.next_observation()?;
            data.push(obs.x, obs.y)?;
        }
        Ok(data)
    }

    pub fn true_regression(&self, chi: &Curve64) -> Result<f64> {
        self.operator.apply(chi)
    }

    /// Exact `r(χ)`, `ζ'(0)`, `f₁(χ)`, `γ` and `σ_ε²` when the process is
    /// scalar-uniform and `χ` is an interior constant curve; `None` otherwise.
    pub fn analytic_truth(&self, chi: &Curve64) -> Result<Option<AnalyticTruth>> {
        if self.process.kind != ProcessKind::ScalarUniform {
            return Ok(None);
        }
        let v = chi.values();
        let u = v[0];
        if v.iter().any(|&x| x != u) || !(u > 0.0 && u < 1.0) {
            return Ok(None);
        }
        let zeta_prime = match self.operator {
            RegressionOperator::Level(map) => map.symmetric_zeta_prime(u),
            _ => 0.0,
        };
        Ok(Some(AnalyticTruth {
            r_chi: self.true_regression(chi)?,
            zeta_prime,
            f1: 2.0,
            gamma: 1.0,
            sigma2_eps: self.noise.variance(),
            valid_up_to: u.min(1.0 - u),
        }))
    }

    /// `F(h) = 2h` for the scalar-uniform process at an interior level.
    pub fn reference_model(&self, chi: &Curve64) -> Result<Option<SmallBallModel64>> {
        match self.analytic_truth(chi)? {
            Some(_) => Ok(Some(scalar_reference_model(chi.values()[0])?)),
            None => Ok(None),
        }
    }
}

/// Seeded generator of `(X_t, Y_t)` in time order.
#[derive(Debug, Clone)]
pub struct ScenarioStream {
    sampler: ProcessSampler,
    x_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    operator: RegressionOperator,
    noise: NoiseSpec,
}

impl ScenarioStream {
    pub fn next_observation(&mut self) -> Result<Observation64> {
        let x = self.sampler.next(&mut self.x_rng)?;
        let eps = self.noise.standard(&mut self.noise_rng);
        let y = self.operator.apply(&x)? + self.noise.sigma * eps;
        Ok(Observation64 { x, y })
    }

    /// Covariates only, for pilot samples and Monte Carlo oracles.
    pub fn next_covariate(&mut self) -> Result<Curve64> {
        self.sampler.next(&mut self.x_rng)
    }
}

impl Iterator for ScenarioStream {
    type Item = Result<Observation64>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_observation())
    }
}
