use serde::{Deserialize, Serialize};

use crate::funcore::{Curve, Observation};
use crate::{Error, Result, Scalar};

use super::batch::batch_evaluate;
use super::EstimatorConfig;

/// Value of the estimator at a point; `Undefined` when no observation has
/// fallen in any ball around it yet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Estimate<T> {
    Value(T),
    Undefined,
}

impl<T: Scalar> Estimate<T> {
    pub(crate) fn from_ratio(num: T, den: T) -> Self {
        if den > T::zero() {
            Estimate::Value(num / den)
        } else {
            Estimate::Undefined
        }
    }

    pub fn value(self) -> Option<T> {
        match self {
            Estimate::Value(v) => Some(v),
            Estimate::Undefined => None,
        }
    }

    pub fn is_undefined(self) -> bool {
        matches!(self, Estimate::Undefined)
    }
}

/// Running `Σ Y_i K_i / F(h_i)^ℓ` and `Σ K_i / F(h_i)^ℓ` at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointSums<T> {
    pub num: T,
    pub den: T,
}

/// Terms contributed by observation `i`, shared by the streaming and batch paths.
pub(crate) struct Step<T> {
    pub h: T,
    pub mass_pow_ell: T,
    pub norm_term: T,
    pub threshold: Option<T>,
}

pub(crate) fn step<T: Scalar>(cfg: &EstimatorConfig<T>, i: u64) -> Result<Step<T>> {
    let h = cfg.schedule.h(i);
    let mass = cfg.smallball.mass(h);
    if !(mass > T::zero() && mass.is_finite()) {
        return Err(Error::domain(format!(
            "small-ball mass F(h_{i}) = {mass} must be positive"
        )));
    }
    Ok(Step {
        h,
        mass_pow_ell: mass.powf(cfg.ell),
        norm_term: mass.powf(T::one() - cfg.ell),
        threshold: cfg.truncation.map(|t| t.threshold(i)),
    })
}

pub(crate) fn effective_response<T: Scalar>(y: T, threshold: Option<T>) -> T {
    match threshold {
        Some(b) if y.abs() > b => T::zero(),
        _ => y,
    }
}

/// FNV-1a over the bit patterns of one observation.
fn fold_digest<T: Scalar>(mut h: u64, x: &Curve<T>, y: T) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    for v in x.values().iter().chain(std::iter::once(&y)) {
        for byte in v.as_f64().to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

pub(crate) const DIGEST_SEED: u64 = 0xcbf2_9ce4_8422_2325;

/// Streaming state for a fixed set of evaluation points.
#[derive(Debug, Clone)]
pub struct RecursiveEstimator<T> {
    config: EstimatorConfig<T>,
    points: Vec<Curve<T>>,
    sums: Vec<PointSums<T>>,
    norm: T,
    n: u64,
    digest: u64,
    retained: Option<Vec<Observation<T>>>,
}

impl<T: Scalar> RecursiveEstimator<T> {
    /// Zero-initialised state over `points`.
    pub fn register_points(config: EstimatorConfig<T>, points: Vec<Curve<T>>) -> Result<Self> {
        config.validate()?;
        let Some(first) = points.first() else {
            return Err(Error::structural(
                "at least one evaluation point is required",
            ));
        };
        if let Some(bad) = points.iter().position(|p| !p.same_grid(first)) {
            return Err(Error::structural(format!(
                "evaluation point {bad} is on a different grid"
            )));
        }
        let sums = vec![PointSums::default(); points.len()];
        Ok(Self {
            config,
            points,
            sums,
            norm: T::zero(),
            n: 0,
            digest: DIGEST_SEED,
            retained: None,
        })
    }

    /// Keeps every absorbed observation so [`query`](Self::query) can answer
    /// for points that were not registered.
    pub fn with_retention(mut self) -> Self {
        if self.retained.is_none() {
            self.retained = Some(Vec::new());
        }
        self
    }

    pub fn config(&self) -> &EstimatorConfig<T> {
        &self.config
    }

    pub fn points(&self) -> &[Curve<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `Σ_{i ≤ n} F(h_i)^{1−ℓ}`.
    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn sums(&self, j: usize) -> Result<PointSums<T>> {
        self.sums
            .get(j)
            .copied()
            .ok_or_else(|| Error::structural(format!("no evaluation point {j}")))
    }

    pub fn digest(&self) -> u64 {
        self.digest
    }

    /// Absorbs observation `n + 1`. On error the state is left unchanged.
    pub fn update(&mut self, x: &Curve<T>, y: T) -> Result<()> {
        if !y.is_finite() {
            return Err(Error::domain("response must be finite"));
        }
        if !x.same_grid(&self.points[0]) {
            return Err(Error::structural("observation is on a different grid"));
        }
        let i = self.n + 1;
        let st = step(&self.config, i)?;
        let kernel_values = self
            .points
            .iter()
            .map(|p| {
                let d = self.config.seminorm.dist(p, x)?;
                self.config.kernel.eval(d / st.h)
            })
            .collect::<Result<Vec<T>>>()?;
        let y_eff = effective_response(y, st.threshold);
        for (s, k) in self.sums.iter_mut().zip(kernel_values) {
            if k > T::zero() {
                s.num += y_eff * k / st.mass_pow_ell;
                s.den += k / st.mass_pow_ell;
            }
        }
        self.norm += st.norm_term;
        self.n = i;
        self.digest = fold_digest(self.digest, x, y);
        if let Some(r) = self.retained.as_mut() {
            r.push(Observation { x: x.clone(), y });
        }
        Ok(())
    }

    pub fn absorb<'a>(&mut self, data: impl IntoIterator<Item = &'a Observation<T>>) -> Result<()> {
        for obs in data {
            self.update(&obs.x, obs.y)?;
        }
        Ok(())
    }

    /// `r_n(χ_j) = num_j / den_j`.
    pub fn evaluate(&self, j: usize) -> Result<Estimate<T>> {
        let s = self.sums(j)?;
        Ok(Estimate::from_ratio(s.num, s.den))
    }

    /// `φ_n(χ_j) = num_j / norm`; `None` before the first update.
    pub fn phi_n(&self, j: usize) -> Result<Option<T>> {
        let s = self.sums(j)?;
        Ok((self.n > 0).then(|| s.num / self.norm))
    }

    /// `f_n(χ_j) = den_j / norm`; `None` before the first update.
    pub fn f_n(&self, j: usize) -> Result<Option<T>> {
        let s = self.sums(j)?;
        Ok((self.n > 0).then(|| s.den / self.norm))
    }

    /// Batch evaluation over retained data at an arbitrary point.
    pub fn query(&self, point: &Curve<T>) -> Result<Estimate<T>> {
        let data = self.retained.as_ref().ok_or_else(|| {
            Error::structural("data retention is off; register the point instead")
        })?;
        if data.is_empty() {
            return Ok(Estimate::Undefined);
        }
        batch_evaluate(&self.config, data, point)
    }

    pub(crate) fn from_parts(
        config: EstimatorConfig<T>,
        points: Vec<Curve<T>>,
        sums: Vec<PointSums<T>>,
        norm: T,
        n: u64,
        digest: u64,
    ) -> Self {
        Self {
            config,
            points,
            sums,
            norm,
            n,
            digest,
            retained: None,
        }
    }
}

/// `|r̃_n(χ_j) − r_n(χ_j)|` between a truncated state and a plain state fed
/// the same observations.
pub fn truncated_gap<T: Scalar>(
    truncated: &RecursiveEstimator<T>,
    plain: &RecursiveEstimator<T>,
    j: usize,
) -> Result<Estimate<T>> {
    if truncated.config.truncation.is_none() || plain.config.truncation.is_some() {
        return Err(Error::structural(
            "expected one truncated and one plain state",
        ));
    }
    if truncated.config.without_truncation() != plain.config {
        return Err(Error::structural("states use different estimator settings"));
    }
    if truncated.n != plain.n || truncated.digest != plain.digest || truncated.len() != plain.len()
    {
        return Err(Error::structural("states were not fed identical data"));
    }
    match (truncated.evaluate(j)?, plain.evaluate(j)?) {
        (Estimate::Value(a), Estimate::Value(b)) => Ok(Estimate::Value((a - b).abs())),
        _ => Ok(Estimate::Undefined),
    }
}
