//! Replication engine: one seeded stream per replication, evaluated at every
//! checkpoint of `n_grid`, for every query point and weight mode.

use funrec::estimator::truncated_gap;
use funrec::smallball::fit_powerlaw;
use funrec::{
    AsymptoticConstants64, Curve64, EstimatorConfig64, RecursiveEstimator64, SmallBallModel64,
};
use funrec_simlab::{replication_seed, Scenario};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Mode, StudyKind};
use crate::{CliError, Result};

const PILOT_QUANTILES: (f64, f64) = (0.05, 0.5);

/// Closed-form or configured facts at a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointTheory {
    pub r_chi: f64,
    pub f1: f64,
    pub gamma: f64,
    pub zeta_prime: f64,
    pub sigma2_eps: f64,
}

#[derive(Debug, Clone)]
pub struct PointSetup {
    pub chi: Curve64,
    pub r_chi: f64,
    pub theory: Option<PointTheory>,
    pub oracle_model: Option<SmallBallModel64>,
    /// Exponent of `φ(h) = h^γ` used to scale deviations.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: ExperimentConfig,
    pub scenario: Scenario,
    pub points: Vec<PointSetup>,
    pub modes: Vec<Mode>,
    /// Leading-order constants; `None` when `γ` is unknown or a limit diverges.
    pub constants: Option<AsymptoticConstants64>,
}

/// Estimator output at one checkpoint, point and mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub estimate: Option<f64>,
    pub phi_n: f64,
    pub f_n: f64,
    /// `|r̃_n − r_n|` against an untruncated twin, when truncation is on.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Replication {
    pub seed: u64,
    /// `samples[checkpoint][point][mode]`
    pub samples: Vec<Vec<Vec<Sample>>>,
    /// Fitted `γ̂` per point in plug-in mode.
    pub gamma_hat: Vec<Option<f64>>,
}

impl Context {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let scenario = cfg.resolve_scenario()?;
        let grid = scenario.grid()?;
        let mut points = Vec::new();
        for chi in scenario.query_points(&grid)? {
            let r_chi = scenario.true_regression(&chi)?;
            let theory = match scenario.analytic_truth(&chi)? {
                Some(t) => Some(PointTheory {
                    r_chi,
                    f1: t.f1,
                    gamma: t.gamma,
                    zeta_prime: t.zeta_prime,
                    sigma2_eps: t.sigma2_eps,
                }),
                None => cfg.theory.map(|t| PointTheory {
                    r_chi,
                    f1: t.f1,
                    gamma: t.gamma,
                    zeta_prime: t.zeta_prime,
                    sigma2_eps: t.sigma2_eps,
                }),
            };
            let oracle_model = match &cfg.estimator.smallball {
                Some(m) => Some(m.clone()),
                None => scenario.reference_model(&chi)?,
            };
            let gamma = theory
                .map(|t| t.gamma)
                .or_else(|| oracle_model.as_ref().and_then(|m| m.gamma()));
            points.push(PointSetup {
                chi,
                r_chi,
                theory,
                oracle_model,
                gamma,
            });
        }
        let modes = cfg.weights.modes().to_vec();
        if modes.contains(&Mode::Oracle) && cfg.study != StudyKind::Constants {
            if let Some(j) = points.iter().position(|p| p.oracle_model.is_none()) {
                return Err(CliError::Config(format!(
                    "query point {j} has no exact small-ball model; set estimator.smallball or use plug-in weights"
                )));
            }
        }
        let gamma = points.iter().find_map(|p| p.gamma);
        let e = &cfg.estimator;
        let constants = match gamma {
            Some(g) => match AsymptoticConstants64::power_law(&e.kernel, &e.schedule, g, e.ell) {
                Ok(c) => Some(c),
                Err(funrec::Error::Divergent(m)) if cfg.study == StudyKind::AsBoundCheck => {
                    return Err(CliError::Infeasible(m))
                }
                Err(funrec::Error::Divergent(_)) => None,
                Err(other) => return Err(other.into()),
            },
            None => None,
        };
        if cfg.study == StudyKind::AsBoundCheck {
            check_as_hypotheses(cfg, gamma)?;
        }
        Ok(Self {
            cfg: cfg.clone(),
            scenario,
            points,
            modes,
            constants,
        })
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.cfg.replications as u64)
            .map(|r| replication_seed(self.cfg.master_seed, r))
            .collect()
    }

    pub fn run(&self) -> Result<Vec<Replication>> {
        self.seeds()
            .into_par_iter()
            .map(|seed| self.replicate(seed))
            .collect()
    }

    fn plugin_model(
        &self,
        stream: &funrec_simlab::ScenarioStream,
        chi: &Curve64,
    ) -> Result<SmallBallModel64> {
        let mut pilot = stream.clone();
        let n = self.cfg.n_pilot.min(self.cfg.n_max() as usize).max(50);
        let mut d = Vec::with_capacity(n);
        for _ in 0..n {
            d.push(
                self.cfg
                    .estimator
                    .seminorm
                    .dist(&pilot.next_covariate()?, chi)?,
            );
        }
        let fit = fit_powerlaw(&d, PILOT_QUANTILES)?;
        Ok(SmallBallModel64::power_law(1.0, fit.gamma)?)
    }

    fn replicate(&self, seed: u64) -> Result<Replication> {
        let sc = self.scenario.with_seed(seed);
        let grid = self.points[0].chi.grid().clone();
        let mut stream = sc.stream_on(grid)?;

        let mut gamma_hat = Vec::with_capacity(self.points.len());
        // estimators[point][mode] = (configured, untruncated twin)
        let mut estimators = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let mut per_mode = Vec::new();
            let mut fitted = None;
            for &mode in &self.modes {
                let model = match mode {
                    Mode::Oracle => p.oracle_model.clone().expect("checked in Context::new"),
                    Mode::Plugin => {
                        let m = self.plugin_model(&stream, &p.chi)?;
                        fitted = m.gamma();
                        m
                    }
                };
                let cfg = self.cfg.estimator.with_model(model)?;
                per_mode.push(self.build(&cfg, &p.chi)?);
            }
            gamma_hat.push(fitted);
            estimators.push(per_mode);
        }

        let mut samples = Vec::with_capacity(self.cfg.n_grid.len());
        let mut n = 0u64;
        for &target in &self.cfg.n_grid {
            while n < target {
                let obs = stream.next_observation()?;
                for per_mode in estimators.iter_mut() {
                    for (main, twin) in per_mode.iter_mut() {
                        main.update(&obs.x, obs.y)?;
                        if let Some(t) = twin {
                            t.update(&obs.x, obs.y)?;
                        }
                    }
                }
                n += 1;
            }
            let mut at_n = Vec::with_capacity(self.points.len());
            for per_mode in &estimators {
                let mut row = Vec::with_capacity(per_mode.len());
                for (main, twin) in per_mode {
                    let gap = match twin {
                        Some(t) => truncated_gap(main, t, 0)?.value(),
                        None => None,
                    };
                    row.push(Sample {
                        estimate: main.evaluate(0)?.value(),
                        phi_n: main.phi_n(0)?.unwrap_or(0.0),
                        f_n: main.f_n(0)?.unwrap_or(0.0),
                        gap,
                    });
                }
                at_n.push(row);
            }
            samples.push(at_n);
        }
        Ok(Replication {
            seed,
            samples,
            gamma_hat,
        })
    }

    fn build(
        &self,
        cfg: &EstimatorConfig64,
        chi: &Curve64,
    ) -> Result<(RecursiveEstimator64, Option<RecursiveEstimator64>)> {
        let main = RecursiveEstimator64::register_points(cfg.clone(), vec![chi.clone()])?;
        let twin = match cfg.truncation {
            Some(_) => Some(RecursiveEstimator64::register_points(
                cfg.without_truncation(),
                vec![chi.clone()],
            )?),
            None => None,
        };
        Ok((main, twin))
    }
}

/// Hypotheses of the almost-sure bound: `n φ(h_n) → ∞` and `n h_n² → 0`.
fn check_as_hypotheses(cfg: &ExperimentConfig, gamma: Option<f64>) -> Result<()> {
    let s = &cfg.estimator.schedule;
    let g = gamma.ok_or_else(|| {
        CliError::Config("as-bound-check needs gamma from the scenario, theory or smallball".into())
    })?;
    if !s.n_h_squared_vanishes() {
        return Err(CliError::Infeasible(format!(
            "n h_n^2 -> 0 needs a > 1/2, got a = {}",
            s.a
        )));
    }
    if !s.n_phi_diverges(g) {
        return Err(CliError::Infeasible(format!(
            "n phi(h_n) -> infinity needs a * gamma < 1, got {}",
            s.a * g
        )));
    }
    Ok(())
}
