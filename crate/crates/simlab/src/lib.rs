//! Simulation scenarios for the functional recursive estimators.
//!
//! A [`Scenario`] couples a covariate process, a regression operator, a noise
//! law and a set of query curves. Everything is seeded; the same scenario and
//! `n` always yield the same bits. All scenarios here are constructions of
//! this crate, which is why their default label is `"constructed"`.

mod diagnostics;
mod error;
mod noise;
mod operator;
mod process;
mod scenario;
mod seeds;
mod zeta;

pub use diagnostics::{fit_geometric_decay, lag_autocorrelation};
pub use error::{Result, SimError};
pub use noise::{NoiseFamily, NoiseSpec};
pub use operator::{RegressionOperator, ScalarMap};
pub use process::{ProcessKind, ProcessSpec};
pub use scenario::{AnalyticTruth, QuerySpec, Scenario, ScenarioStream, SCHEMA_VERSION};
pub use seeds::{replication_seed, splitmix64};
pub use zeta::{estimate_zeta_prime, ZetaEstimate};
