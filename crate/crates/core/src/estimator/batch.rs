use crate::funcore::{Curve, Observation};
use crate::{Error, Result, Scalar};

use super::state::{effective_response, step};
use super::{Estimate, EstimatorConfig};

/// Direct sums `(Σ Y_i K_i / F(h_i)^ℓ, Σ K_i / F(h_i)^ℓ, Σ F(h_i)^{1−ℓ})` over
/// `data` in order, at `point`.
pub fn batch_sums<T: Scalar>(
    cfg: &EstimatorConfig<T>,
    data: &[Observation<T>],
    point: &Curve<T>,
) -> Result<(T, T, T)> {
    cfg.validate()?;
    let mut num = T::zero();
    let mut den = T::zero();
    let mut norm = T::zero();
    for (idx, obs) in data.iter().enumerate() {
        if !obs.y.is_finite() {
            return Err(Error::domain("response must be finite"));
        }
        let st = step(cfg, idx as u64 + 1)?;
        let k = cfg.kernel.eval(cfg.seminorm.dist(point, &obs.x)? / st.h)?;
        if k > T::zero() {
            num += effective_response(obs.y, st.threshold) * k / st.mass_pow_ell;
            den += k / st.mass_pow_ell;
        }
        norm += st.norm_term;
    }
    Ok((num, den, norm))
}

/// Non-recursive evaluation of the estimator at `point` from `data`.
pub fn batch_evaluate<T: Scalar>(
    cfg: &EstimatorConfig<T>,
    data: &[Observation<T>],
    point: &Curve<T>,
) -> Result<Estimate<T>> {
    if data.is_empty() {
        return Err(Error::domain(
            "batch evaluation needs at least one observation",
        ));
    }
    let (num, den, _) = batch_sums(cfg, data, point)?;
    Ok(Estimate::from_ratio(num, den))
}
