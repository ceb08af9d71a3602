use std::fs;
use std::path::{Path, PathBuf};

use funrec::{
    BandwidthSchedule64, EstimatorConfig64, Kernel64, SemiNorm, SmallBallModel64, Truncation,
};
use funrec_simlab::Scenario;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    MseDecay,
    VarianceCheck,
    AsBoundCheck,
    BiasCheck,
    /// Gap between truncated and plain estimates along `n_grid`.
    TruncationCheck,
    Constants,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::MseDecay => "mse-decay",
            StudyKind::VarianceCheck => "variance-check",
            StudyKind::AsBoundCheck => "as-bound-check",
            StudyKind::BiasCheck => "bias-check",
            StudyKind::TruncationCheck => "truncation-check",
            StudyKind::Constants => "constants",
        }
    }
}

/// Which small-ball model feeds the estimator weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// The configured model, or the scenario's exact model when none is configured.
    #[default]
    Oracle,
    /// `φ(h) = h^γ̂` with `γ̂` fitted on pilot distances.
    Plugin,
    Both,
}

impl WeightMode {
    pub fn modes(self) -> &'static [Mode] {
        match self {
            WeightMode::Oracle => &[Mode::Oracle],
            WeightMode::Plugin => &[Mode::Plugin],
            WeightMode::Both => &[Mode::Oracle, Mode::Plugin],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Oracle,
    Plugin,
}

impl Mode {
    /// Prefix for metric names; oracle metrics are unprefixed.
    pub fn prefix(self) -> &'static str {
        match self {
            Mode::Oracle => "",
            Mode::Plugin => "plugin.",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Path(PathBuf),
    Inline(Box<Scenario>),
}

/// Estimator settings of an experiment; the small-ball model is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub ell: f64,
    #[serde(default = "default_kernel")]
    pub kernel: Kernel64,
    #[serde(default = "default_seminorm")]
    pub seminorm: SemiNorm,
    pub schedule: BandwidthSchedule64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smallball: Option<SmallBallModel64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation<f64>>,
}

fn default_kernel() -> Kernel64 {
    Kernel64::Uniform
}

fn default_seminorm() -> SemiNorm {
    SemiNorm::L2
}

impl EstimatorSpec {
    pub fn with_model(&self, smallball: SmallBallModel64) -> Result<EstimatorConfig64> {
        let cfg = EstimatorConfig64::new(
            self.ell,
            self.kernel.clone(),
            self.seminorm,
            self.schedule,
            smallball,
        )?;
        match self.truncation {
            Some(t) => Ok(cfg.with_truncation(t)?),
            None => Ok(cfg),
        }
    }
}

/// Theory inputs for scenarios without closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryInputs {
    pub f1: f64,
    pub gamma: f64,
    pub zeta_prime: f64,
    pub sigma2_eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Slack {
    /// Multiplier on the almost-sure bound.
    pub as_bound: f64,
    /// Relative tolerance on second-order constants.
    pub variance: f64,
    /// Relative tolerance on the bias ratio.
    pub bias: f64,
    /// Bound on `|t|` for quantities predicted to vanish.
    pub t_stat: f64,
}

impl Default for Slack {
    fn default() -> Self {
        Self {
            as_bound: 1.5,
            variance: 0.25,
            bias: 0.3,
            t_stat: 3.0,
        }
    }
}

fn default_pilot() -> usize {
    2000
}

fn default_undefined() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioRef,
    pub estimator: EstimatorSpec,
    pub n_grid: Vec<u64>,
    pub replications: usize,
    pub study: StudyKind,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    pub master_seed: u64,
    #[serde(default)]
    pub weights: WeightMode,
    #[serde(default = "default_pilot")]
    pub n_pilot: usize,
    #[serde(default)]
    pub slack: Slack,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheoryInputs>,
    /// Largest tolerated share of Undefined estimates at any `n`.
    #[serde(default = "default_undefined")]
    pub max_undefined: f64,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let ScenarioRef::Path(p) = &cfg.scenario {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.scenario = ScenarioRef::Path(dir.join(p));
                }
            }
        }
        Ok(cfg)
    }

    pub fn resolve_scenario(&self) -> Result<Scenario> {
        let s = match &self.scenario {
            ScenarioRef::Inline(s) => (**s).clone(),
            ScenarioRef::Path(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text)?
            }
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.study != StudyKind::Constants {
            if self.n_grid.is_empty() {
                return Err(CliError::Config("n_grid must not be empty".into()));
            }
            if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::Config(
                    "n_grid must be positive and strictly increasing".into(),
                ));
            }
            if self.replications == 0 {
                return Err(CliError::Config("replications must be at least 1".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.max_undefined) {
            return Err(CliError::Config("max_undefined must lie in [0, 1]".into()));
        }
        let s = &self.slack;
        if [s.as_bound, s.variance, s.bias, s.t_stat]
            .iter()
            .any(|v| !(*v > 0.0 && v.is_finite()))
        {
            return Err(CliError::Config("slack factors must be positive".into()));
        }
        if self.weights != WeightMode::Oracle && self.n_pilot < 50 {
            return Err(CliError::Config(
                "plug-in weights need n_pilot >= 50".into(),
            ));
        }
        if let Some(t) = &self.theory {
            if !(t.f1 > 0.0 && t.gamma > 0.0 && t.sigma2_eps >= 0.0) {
                return Err(CliError::Config(
                    "theory inputs need f1 > 0, gamma > 0, sigma2_eps >= 0".into(),
                ));
            }
        }
        let e = &self.estimator;
        let probe = e
            .smallball
            .clone()
            .unwrap_or(SmallBallModel64::power_law(1.0, 1.0)?);
        e.with_model(probe)?;
        if self.study == StudyKind::TruncationCheck && e.truncation.is_none() {
            return Err(CliError::Config(
                "truncation-check needs estimator.truncation".into(),
            ));
        }
        self.resolve_scenario()?;
        Ok(())
    }

    pub fn n_max(&self) -> u64 {
        self.n_grid.last().copied().unwrap_or(0)
    }
}
