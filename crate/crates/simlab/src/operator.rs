use funrec::funcore::integrate;
use funrec::Curve64;
use serde::{Deserialize, Serialize};

use crate::Result;

/// Scalar link applied to the level of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum ScalarMap {
    /// `intercept + slope · u`
    Linear { slope: f64, intercept: f64 },
    /// `u²`
    Square,
    /// `(u − center)²`
    SquaredDeviation { center: f64 },
    /// `|u − center|`
    AbsDeviation { center: f64 },
}

impl ScalarMap {
    pub fn apply(&self, u: f64) -> f64 {
        match *self {
            ScalarMap::Linear { slope, intercept } => intercept + slope * u,
            ScalarMap::Square => u * u,
            ScalarMap::SquaredDeviation { center } => (u - center) * (u - center),
            ScalarMap::AbsDeviation { center } => (u - center).abs(),
        }
    }

    /// `ζ'(0)` at level `u` when `U` has a continuous positive density at `u`,
    /// so `U − u` given `|U − u| = t` is `±t` with equal probability.
    pub fn symmetric_zeta_prime(&self, u: f64) -> f64 {
        match *self {
            ScalarMap::AbsDeviation { center } if u == center => 1.0,
            _ => 0.0,
        }
    }
}

/// The regression operator `r(χ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegressionOperator {
    /// `∫ χ(s) ds`
    Integral,
    /// `∫ χ(s)² ds`
    IntegralOfSquare,
    Constant {
        value: f64,
    },
    /// `map(level)` with `level = ∫ χ / (t_m − t_0)`, the value of a constant curve.
    Level(ScalarMap),
}

impl RegressionOperator {
    pub fn apply(&self, chi: &Curve64) -> Result<f64> {
        let grid = chi.grid();
        Ok(match self {
            RegressionOperator::Integral => integrate(chi.values(), grid)?,
            RegressionOperator::IntegralOfSquare => {
                let sq: Vec<f64> = chi.values().iter().map(|v| v * v).collect();
                integrate(&sq, grid)?
            }
            RegressionOperator::Constant { value } => *value,
            RegressionOperator::Level(map) => {
                map.apply(integrate(chi.values(), grid)? / (grid.last() - grid.first()))
            }
        })
    }
}
