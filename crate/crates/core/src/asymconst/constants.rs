use serde::{Deserialize, Serialize};

use crate::funcore::{simpson_unit, CompensatedSum, Kernel, FINE_GRID_POINTS};
use crate::{Error, Result, Scalar};

use super::sequences::{alpha_limit, beta_limit};
use super::{BandwidthSchedule, TauModel};

/// Kernel constants
/// `M₀ = K(1) − ∫(sK)'τ₀`, `M₁ = K(1) − ∫K'τ₀`, `M₂ = K²(1) − ∫(K²)'τ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MConstants<T> {
    pub m0: T,
    pub m1: T,
    pub m2: T,
}

/// Direct quadrature of the defining integrands; needs `K'` in closed form.
pub fn m_constants_direct<T: Scalar>(k: &Kernel<T>, tau: &TauModel<T>) -> Result<MConstants<T>> {
    k.validate()?;
    tau.validate()?;
    if !k.has_analytic_derivative() {
        return Err(Error::domain(
            "direct route needs a kernel with a closed-form derivative",
        ));
    }
    let kp = |s: T| k.derivative(s).expect("analytic derivative");
    let k1 = k.value_at_one();
    let two = T::lit(2.0);
    let i0 = simpson_unit(
        |s| (k.eval_unit(s) + s * kp(s)) * tau.eval(s),
        FINE_GRID_POINTS,
    );
    let i1 = simpson_unit(|s| kp(s) * tau.eval(s), FINE_GRID_POINTS);
    let i2 = simpson_unit(
        |s| two * k.eval_unit(s) * kp(s) * tau.eval(s),
        FINE_GRID_POINTS,
    );
    Ok(MConstants {
        m0: k1 - i0,
        m1: k1 - i1,
        m2: k1 * k1 - i2,
    })
}

/// Midpoint Riemann–Stieltjes sum of `∫₀¹ g dτ` on `intervals` cells.
fn stieltjes<T: Scalar>(g: &impl Fn(T) -> T, tau: &TauModel<T>, intervals: usize) -> T {
    let m = T::from_count(intervals as u64);
    let half = T::lit(0.5);
    let mut acc = CompensatedSum::new();
    let mut prev = tau.eval(T::zero());
    for k in 0..intervals {
        let right = T::from_count(k as u64 + 1) / m;
        let next = tau.eval(right);
        let mid = (T::from_count(k as u64) + half) / m;
        acc.add(g(mid) * (next - prev));
        prev = next;
    }
    acc.value()
}

/// `∫ g dτ₀` with one Richardson step over the fine and half-fine grids.
fn stieltjes_extrapolated<T: Scalar>(g: impl Fn(T) -> T, tau: &TauModel<T>) -> T {
    let fine = FINE_GRID_POINTS - 1;
    let s_fine = stieltjes(&g, tau, fine);
    let s_coarse = stieltjes(&g, tau, fine / 2);
    (T::lit(4.0) * s_fine - s_coarse) / T::lit(3.0)
}

/// Integration-by-parts form, free of kernel derivatives:
/// `∫₀¹ g'τ₀ = g(1)τ₀(1) − g(0)τ₀(0) − ∫₀¹ g dτ₀`.
pub fn m_constants_by_parts<T: Scalar>(k: &Kernel<T>, tau: &TauModel<T>) -> Result<MConstants<T>> {
    k.validate()?;
    tau.validate()?;
    let (k0, k1) = (k.eval_unit(T::zero()), k.value_at_one());
    let (t0, t1) = (tau.eval(T::zero()), tau.eval(T::one()));
    let tail = T::one() - t1;
    let s0 = stieltjes_extrapolated(|s| s * k.eval_unit(s), tau);
    let s1 = stieltjes_extrapolated(|s| k.eval_unit(s), tau);
    let s2 = stieltjes_extrapolated(
        |s| {
            let v = k.eval_unit(s);
            v * v
        },
        tau,
    );
    Ok(MConstants {
        m0: k1 * tail + s0,
        m1: k1 * tail + k0 * t0 + s1,
        m2: k1 * k1 * tail + k0 * k0 * t0 + s2,
    })
}

/// Direct route for closed-form kernels, by-parts route for tabulated ones.
pub fn m_constants<T: Scalar>(k: &Kernel<T>, tau: &TauModel<T>) -> Result<MConstants<T>> {
    if k.has_analytic_derivative() {
        m_constants_direct(k, tau)
    } else {
        m_constants_by_parts(k, tau)
    }
}

/// Every constant entering the leading-order predictions at a fixed `ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants<T> {
    pub m: MConstants<T>,
    pub ell: T,
    /// `α[ℓ]`.
    pub alpha: T,
    /// `(r, β[r])` pairs; always contains `r = 1 − ℓ` and `r = 1 − 2ℓ`.
    pub beta: Vec<(T, T)>,
}

impl<T: Scalar> AsymptoticConstants<T> {
    pub fn new(m: MConstants<T>, ell: T, alpha: T, beta: Vec<(T, T)>) -> Result<Self> {
        let c = Self {
            m,
            ell,
            alpha,
            beta,
        };
        c.beta_at(T::one() - ell)?;
        c.beta_at(T::one() - T::lit(2.0) * ell)?;
        Ok(c)
    }

    /// Constants for `φ(h) = h^γ` (so `τ₀(s) = s^γ`) and a power-law schedule.
    pub fn power_law(
        k: &Kernel<T>,
        sched: &BandwidthSchedule<T>,
        gamma: T,
        ell: T,
    ) -> Result<Self> {
        let tau = TauModel::power_law(gamma)?;
        let m = m_constants(k, &tau)?;
        let alpha = alpha_limit(sched, gamma, ell)?;
        let two = T::lit(2.0);
        let mut rs = vec![T::one() - ell, T::one() - two * ell];
        for r in [-1.0, 0.0, 0.5, 1.0, 1.5, 2.0] {
            rs.push(T::lit(r));
        }
        let mut beta = Vec::new();
        for r in rs {
            if beta
                .iter()
                .any(|(q, _): &(T, T)| (*q - r).abs() < T::lit(1e-12))
            {
                continue;
            }
            match beta_limit(sched, gamma, r) {
                Ok(b) => beta.push((r, b)),
                Err(e) if r == T::one() - ell || r == T::one() - two * ell => return Err(e),
                Err(_) => {}
            }
        }
        beta.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite exponents"));
        Self::new(m, ell, alpha, beta)
    }

    pub fn beta_at(&self, r: T) -> Result<T> {
        self.beta
            .iter()
            .find(|(q, _)| (*q - r).abs() < T::lit(1e-12))
            .map(|(_, b)| *b)
            .ok_or_else(|| Error::domain(format!("beta[{r}] not available")))
    }

    /// `β[1−2ℓ] / β[1−ℓ]²`.
    pub fn beta_ratio(&self) -> T {
        let b1 = self
            .beta_at(T::one() - self.ell)
            .expect("checked at construction");
        let b2 = self
            .beta_at(T::one() - T::lit(2.0) * self.ell)
            .expect("checked at construction");
        b2 / (b1 * b1)
    }
}
