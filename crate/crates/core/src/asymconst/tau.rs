use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Limit shape `τ₀(s) = lim_{h→0} φ(hs)/φ(h)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauModel<T> {
    /// `τ₀(s) = s^γ`, the shape of `φ(h) = h^γ`.
    PowerLaw { gamma: T },
    /// Values on equally spaced nodes of `[0, 1]`, linearly interpolated.
    Custom { values: Vec<T> },
}

impl<T: Scalar> TauModel<T> {
    pub fn power_law(gamma: T) -> Result<Self> {
        let m = TauModel::PowerLaw { gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TauModel::PowerLaw { gamma } => {
                if !(gamma.is_finite() && *gamma > T::zero()) {
                    return Err(Error::validation("tau power-law exponent must be positive"));
                }
            }
            TauModel::Custom { values } => {
                if values.len() < 2 {
                    return Err(Error::validation("tabulated tau needs at least two nodes"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::validation("tabulated tau must be finite"));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::validation("tau must be nondecreasing on [0, 1]"));
                }
                let tol = T::lit(1e-12);
                if values[0].abs() > tol {
                    return Err(Error::validation("tau must vanish at 0"));
                }
                if (values[values.len() - 1] - T::one()).abs() > tol {
                    return Err(Error::validation("tau must equal 1 at 1"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: T) -> T {
        let s = s.max(T::zero()).min(T::one());
        match self {
            TauModel::PowerLaw { gamma } => s.powf(*gamma),
            TauModel::Custom { values } => {
                let last = values.len() - 1;
                let x = s * T::from_count(last as u64);
                let k = x.floor().to_usize().unwrap_or(0).min(last - 1);
                let frac = x - T::from_count(k as u64);
                values[k] + (values[k + 1] - values[k]) * frac
            }
        }
    }
}
