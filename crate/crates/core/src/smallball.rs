//! Small-ball probability `F(h) = P(‖χ − X‖ ≤ h) = φ(h) f₁(χ)`.
//!
//! The estimator only ever uses `F(h_i)` through ratios in which a constant
//! factor cancels, so a fitted `γ` alone is enough to run it.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallBallKind<T> {
    /// `F(h) = c · h^γ`, so `φ(h) = h^γ` and `f₁(χ) = c`.
    PowerLaw { c: T, gamma: T },
    /// Empirical CDF of pilot distances (stored sorted).
    Empirical { distances: Vec<T> },
}

/// Accepts either the full model or the `{kind, C, gamma}` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr<T>", bound(deserialize = "T: Scalar"))]
pub struct SmallBallModel<T> {
    pub kind: SmallBallKind<T>,
    /// Largest radius at which the model is exact, if bounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid_up_to: Option<T>,
}

#[derive(Deserialize)]
#[serde(untagged, bound(deserialize = "T: Scalar"))]
enum ModelRepr<T> {
    Full {
        kind: SmallBallKind<T>,
        #[serde(default)]
        valid_up_to: Option<T>,
    },
    Record {
        kind: String,
        #[serde(rename = "C")]
        c: T,
        gamma: T,
    },
}

impl<T: Scalar> TryFrom<ModelRepr<T>> for SmallBallModel<T> {
    type Error = Error;

    fn try_from(r: ModelRepr<T>) -> Result<Self> {
        match r {
            ModelRepr::Full { kind, valid_up_to } => Ok(Self { kind, valid_up_to }),
            ModelRepr::Record { kind, c, gamma } if kind == "power_law" => {
                Self::power_law(c, gamma)
            }
            ModelRepr::Record { kind, .. } => Err(Error::validation(format!(
                "a {{kind, C, gamma}} record must have kind \"power_law\", got \"{kind}\""
            ))),
        }
    }
}

/// Least-squares power-law fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit<T> {
    pub c: T,
    pub gamma: T,
    /// Number of quantile points used.
    pub n_used: usize,
}

/// `{kind, C, gamma}` record written alongside experiment outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallBallJson {
    pub kind: String,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub gamma: Option<f64>,
}

impl<T: Scalar> SmallBallModel<T> {
    pub fn power_law(c: T, gamma: T) -> Result<Self> {
        let m = Self {
            kind: SmallBallKind::PowerLaw { c, gamma },
            valid_up_to: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn empirical(mut distances: Vec<T>) -> Result<Self> {
        if distances.is_empty() {
            return Err(Error::validation("empirical model needs pilot distances"));
        }
        if distances.iter().any(|d| !d.is_finite() || *d < T::zero()) {
            return Err(Error::validation(
                "pilot distances must be finite and nonnegative",
            ));
        }
        distances.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(Self {
            kind: SmallBallKind::Empirical { distances },
            valid_up_to: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SmallBallKind::PowerLaw { c, gamma } => {
                if !(c.is_finite() && *c > T::zero() && gamma.is_finite() && *gamma > T::zero()) {
                    return Err(Error::validation(
                        "power-law small-ball needs C > 0 and gamma > 0",
                    ));
                }
            }
            SmallBallKind::Empirical { distances } => {
                if distances.is_empty() || distances.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::validation(
                        "empirical distances must be nonempty and sorted",
                    ));
                }
            }
        }
        Ok(())
    }

    /// `F(h)`, clamped to `[0, 1]`.
    pub fn cdf(&self, h: T) -> Result<T> {
        if h.is_nan() || h < T::zero() {
            return Err(Error::domain(format!("radius must be >= 0, got {h}")));
        }
        if let Some(r) = self.valid_up_to {
            if h > r {
                return Err(Error::domain(format!(
                    "radius {h} exceeds model validity radius {r}"
                )));
            }
        }
        Ok(match &self.kind {
            SmallBallKind::PowerLaw { c, gamma } => (*c * h.powf(*gamma)).min(T::one()),
            SmallBallKind::Empirical { distances } => {
                let count = distances.partition_point(|d| *d <= h);
                T::from_count(count as u64) / T::from_count(distances.len() as u64)
            }
        })
    }

    /// Unclamped mass used in estimator weights; no validity check.
    pub fn mass(&self, h: T) -> T {
        match &self.kind {
            SmallBallKind::PowerLaw { c, gamma } => *c * h.powf(*gamma),
            SmallBallKind::Empirical { distances } => {
                let count = distances.partition_point(|d| *d <= h);
                T::from_count(count as u64) / T::from_count(distances.len() as u64)
            }
        }
    }

    /// `φ(h) = h^γ` for the power law; the empirical CDF otherwise.
    pub fn phi(&self, h: T) -> T {
        match &self.kind {
            SmallBallKind::PowerLaw { gamma, .. } => h.powf(*gamma),
            SmallBallKind::Empirical { .. } => self.mass(h),
        }
    }

    pub fn gamma(&self) -> Option<T> {
        match &self.kind {
            SmallBallKind::PowerLaw { gamma, .. } => Some(*gamma),
            SmallBallKind::Empirical { .. } => None,
        }
    }

    /// Same model with `F` multiplied by `k` (power law only).
    pub fn rescaled(&self, k: T) -> Result<Self> {
        match &self.kind {
            SmallBallKind::PowerLaw { c, gamma } => Ok(Self {
                kind: SmallBallKind::PowerLaw {
                    c: *c * k,
                    gamma: *gamma,
                },
                valid_up_to: self.valid_up_to,
            }),
            SmallBallKind::Empirical { .. } => {
                Err(Error::domain("cannot rescale an empirical CDF"))
            }
        }
    }

    pub fn to_json(&self) -> SmallBallJson {
        match &self.kind {
            SmallBallKind::PowerLaw { c, gamma } => SmallBallJson {
                kind: "power_law".into(),
                c: Some(c.as_f64()),
                gamma: Some(gamma.as_f64()),
            },
            SmallBallKind::Empirical { .. } => SmallBallJson {
                kind: "empirical".into(),
                c: None,
                gamma: None,
            },
        }
    }
}

/// `F(h) = F_eval`; shorthand for [`SmallBallModel::cdf`].
pub fn f_eval<T: Scalar>(m: &SmallBallModel<T>, h: T) -> Result<T> {
    m.cdf(h)
}

/// Fits `log F̂(h) = log C + γ log h` by least squares over the empirical
/// quantiles whose levels fall in `quantile_range`.
pub fn fit_powerlaw<T: Scalar>(distances: &[T], quantile_range: (T, T)) -> Result<PowerLawFit<T>> {
    let (lo, hi) = quantile_range;
    if !(lo > T::zero() && lo < hi && hi < T::one()) {
        return Err(Error::domain("quantile range must satisfy 0 < lo < hi < 1"));
    }
    if distances.len() < 50 {
        return Err(Error::domain(format!(
            "power-law fit needs at least 50 distances, got {}",
            distances.len()
        )));
    }
    if distances.iter().any(|d| !d.is_finite() || *d < T::zero()) {
        return Err(Error::domain("distances must be finite and nonnegative"));
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = T::from_count(sorted.len() as u64);
    let pts: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .filter_map(|(k, &d)| {
            let level = T::from_count(k as u64 + 1) / n;
            (level >= lo && level <= hi && d > T::zero())
                .then(|| (d.as_f64().ln(), level.as_f64().ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit(
            "too few positive distances in the quantile range".into(),
        ));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 1e-12 * m) {
        return Err(Error::Fit(
            "degenerate distances: no spread in the quantile range".into(),
        ));
    }
    let gamma = sxy / sxx;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Fit(format!(
            "fitted exponent {gamma} is not positive"
        )));
    }
    let log_c = my - gamma * mx;
    Ok(PowerLawFit {
        c: T::lit(log_c.exp()),
        gamma: T::lit(gamma),
        n_used: pts.len(),
    })
}

/// Exact model for `X ~ Uniform(0, 1)` under `|·|` at interior `u`:
/// `F(h) = 2h` for `h ≤ min(u, 1 − u)`.
pub fn scalar_reference_model<T: Scalar>(u: T) -> Result<SmallBallModel<T>> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::domain(format!(
            "reference point must lie in (0, 1), got {u}"
        )));
    }
    let mut m = SmallBallModel::power_law(T::lit(2.0), T::one())?;
    m.valid_up_to = Some(u.min(T::one() - u));
    Ok(m)
}
