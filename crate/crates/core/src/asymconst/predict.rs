//! Leading-order theory at a query point. The `1 + o(1)` factors are dropped.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

use super::AsymptoticConstants;

/// Scenario facts at the query point `χ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointInputs<T> {
    /// `ζ'(0)`, slope of `t ↦ E[r(X) − r(χ) | ‖X − χ‖ = t]` at zero.
    pub zeta_prime: T,
    /// `σ_ε²(χ)`.
    pub sigma2_eps: T,
    /// `f₁(χ)`.
    pub f1: T,
    /// `r(χ)`.
    pub r_chi: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrder<T> {
    pub var_fn: T,
    pub var_phin: T,
    pub cov: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction<T> {
    pub n: u64,
    pub bias_n: T,
    pub var_fn: T,
    pub var_phin: T,
    pub cov_n: T,
    pub mse_n: T,
    pub as_bound: T,
}

fn check_f1<T: Scalar>(f1: T) -> Result<()> {
    if f1 > T::zero() && f1.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("f1(chi) must be positive, got {f1}")))
    }
}

fn check_n_phi<T: Scalar>(n: u64, phi_hn: T) -> Result<T> {
    let n_phi = T::from_count(n) * phi_hn;
    if n_phi > T::zero() && n_phi.is_finite() {
        Ok(n_phi)
    } else {
        Err(Error::domain("n * phi(h_n) must be positive"))
    }
}

/// `V_ℓ(χ) = (β[1−2ℓ]/β[1−ℓ]²) (σ_ε²/f₁) M₂`.
pub fn v_ell<T: Scalar>(c: &AsymptoticConstants<T>, sigma2_eps: T, f1: T) -> Result<T> {
    check_f1(f1)?;
    Ok(c.beta_ratio() * sigma2_eps / f1 * c.m.m2)
}

/// `(2/M₁)(1 + V_ℓ(χ))`.
pub fn as_bound<T: Scalar>(c: &AsymptoticConstants<T>, sigma2_eps: T, f1: T) -> Result<T> {
    Ok(T::lit(2.0) / c.m.m1 * (T::one() + v_ell(c, sigma2_eps, f1)?))
}

/// `h_n ζ'(0) (α[ℓ]/β[1−ℓ]) (M₀/M₁)`.
pub fn predict_bias<T: Scalar>(c: &AsymptoticConstants<T>, zeta_prime: T, h_n: T) -> T {
    let b1 = c
        .beta_at(T::one() - c.ell)
        .expect("checked at construction");
    h_n * zeta_prime * (c.alpha / b1) * (c.m.m0 / c.m.m1)
}

/// Leading variances of `f_n`, `φ_n` and their covariance.
pub fn predict_second_order<T: Scalar>(
    c: &AsymptoticConstants<T>,
    r_chi: T,
    sigma2_eps: T,
    f1: T,
    n: u64,
    phi_hn: T,
) -> Result<SecondOrder<T>> {
    check_f1(f1)?;
    let n_phi = check_n_phi(n, phi_hn)?;
    let base = c.beta_ratio() * c.m.m2 / f1 / n_phi;
    Ok(SecondOrder {
        var_fn: base,
        var_phin: base * (r_chi * r_chi + sigma2_eps),
        cov: base * r_chi,
    })
}

/// Squared leading bias plus `β[1−2ℓ]M₂σ_ε² / (β[1−ℓ]²M₁²f₁ nφ(h_n))`.
pub fn predict_mse<T: Scalar>(
    c: &AsymptoticConstants<T>,
    zeta_prime: T,
    sigma2_eps: T,
    f1: T,
    n: u64,
    h_n: T,
    phi_hn: T,
) -> Result<T> {
    check_f1(f1)?;
    let n_phi = check_n_phi(n, phi_hn)?;
    let bias = predict_bias(c, zeta_prime, h_n);
    let var = c.beta_ratio() * c.m.m2 * sigma2_eps / (c.m.m1 * c.m.m1 * f1 * n_phi);
    Ok(bias * bias + var)
}

pub fn predict<T: Scalar>(
    c: &AsymptoticConstants<T>,
    p: &PointInputs<T>,
    n: u64,
    h_n: T,
    phi_hn: T,
) -> Result<TheoryPrediction<T>> {
    let so = predict_second_order(c, p.r_chi, p.sigma2_eps, p.f1, n, phi_hn)?;
    Ok(TheoryPrediction {
        n,
        bias_n: predict_bias(c, p.zeta_prime, h_n),
        var_fn: so.var_fn,
        var_phin: so.var_phin,
        cov_n: so.cov,
        mse_n: predict_mse(c, p.zeta_prime, p.sigma2_eps, p.f1, n, h_n, phi_hn)?,
        as_bound: as_bound(c, p.sigma2_eps, p.f1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymconst::{BandwidthSchedule, MConstants};
    use crate::Kernel;

    fn degenerate(m2: f64) -> AsymptoticConstants<f64> {
        let m = MConstants {
            m0: 0.5,
            m1: 1.0,
            m2,
        };
        AsymptoticConstants::<f64>::new(m, 0.0, 1.0, vec![(1.0, 1.0)]).unwrap()
    }

    fn with(alpha: f64, b1ml: f64, b1m2l: f64, m0: f64) -> AsymptoticConstants<f64> {
        let m = MConstants {
            m0,
            m1: 1.0,
            m2: 1.0,
        };
        AsymptoticConstants::<f64>::new(m, 0.25, alpha, vec![(0.5, b1m2l), (0.75, b1ml)]).unwrap()
    }

    #[test]
    fn v_ell_examples() {
        let c = degenerate(1.0);
        assert_eq!(v_ell(&c, 0.0, 2.0).unwrap(), 0.0);
        assert!((v_ell(&c, 0.25, 2.0).unwrap() - 0.125).abs() < 1e-15);
        assert!(matches!(v_ell(&c, 0.25, 0.0), Err(Error::Domain(_))));

        let s = BandwidthSchedule::<f64>::new(1.0, 0.25).unwrap();
        let c = AsymptoticConstants::<f64>::power_law(&Kernel::Uniform, &s, 2.0, 0.0).unwrap();
        assert!((v_ell(&c, 1.0, 2.0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bias_examples() {
        let c = with(1.25, 2.0, 1.0, 2.0 / 3.0);
        assert_eq!(predict_bias(&c, 0.0, 0.1), 0.0);
        let b = predict_bias(&c, 1.0, 0.1);
        assert!((b - 0.1 * 1.25 / 2.0 * (2.0 / 3.0)).abs() < 1e-15);
        assert!((b - 0.041_666_666_666_666_664).abs() < 1e-12);
        assert!((predict_bias(&c, 1.0, 0.2) - 2.0 * b).abs() < 1e-15);
    }

    #[test]
    fn second_order_examples() {
        let c = with(1.25, 2.0, 2.0, 0.5);
        let so = predict_second_order(&c, 0.0, 0.3, 2.0, 10_000, 0.01).unwrap();
        assert!((so.var_fn - 0.0025).abs() < 1e-15);
        assert_eq!(so.cov, 0.0);
        assert!((so.var_phin - 0.3 * so.var_fn).abs() < 1e-15);
        let so4 = predict_second_order(&c, 0.7, 0.3, 2.0, 40_000, 0.01).unwrap();
        let so1 = predict_second_order(&c, 0.7, 0.3, 2.0, 10_000, 0.01).unwrap();
        assert!((so4.var_fn * 4.0 - so1.var_fn).abs() < 1e-15);
        assert!((so4.var_phin * 4.0 - so1.var_phin).abs() < 1e-15);
        assert!((so4.cov * 4.0 - so1.cov).abs() < 1e-15);
        assert!(predict_second_order(&c, 0.0, 0.3, -1.0, 10, 0.1).is_err());
    }

    #[test]
    fn mse_composes_bias_and_variance() {
        let c = with(1.25, 2.0, 2.0, 2.0 / 3.0);
        assert_eq!(predict_mse(&c, 0.0, 0.0, 2.0, 100, 0.1, 0.1).unwrap(), 0.0);
        let bias = predict_bias(&c, 1.0, 0.1);
        let so = predict_second_order(&c, 0.0, 1.0, 2.0, 10_000, 0.01).unwrap();
        let mse = predict_mse(&c, 1.0, 1.0, 2.0, 10_000, 0.1, 0.01).unwrap();
        assert!((mse - (bias * bias + so.var_fn)).abs() < 1e-15);
        assert!((mse - (0.041_666_666_666_666_67f64.powi(2) + 0.0025)).abs() < 1e-12);
    }

    #[test]
    fn mse_optimal_bandwidth_balance() {
        // Oracle: argmin over a fine log-grid of h, compared across two n.
        let gamma = 1.5;
        let s = BandwidthSchedule::<f64>::new(1.0, 0.2).unwrap();
        let c = AsymptoticConstants::<f64>::power_law(&Kernel::Uniform, &s, gamma, 0.0).unwrap();
        let argmin = |n: u64| {
            (0..20_000)
                .map(|k| 10f64.powf(-4.0 + 4.0 * k as f64 / 20_000.0))
                .min_by(|&a, &b| {
                    let fa = predict_mse(&c, 1.0, 1.0, 2.0, n, a, a.powf(gamma)).unwrap();
                    let fb = predict_mse(&c, 1.0, 1.0, 2.0, n, b, b.powf(gamma)).unwrap();
                    fa.partial_cmp(&fb).unwrap()
                })
                .unwrap()
        };
        let (n1, n2) = (10_000u64, 10_000_000u64);
        let slope = (argmin(n2).ln() - argmin(n1).ln()) / ((n2 as f64).ln() - (n1 as f64).ln());
        assert!((slope + 1.0 / (2.0 + gamma)).abs() < 1e-3, "slope {slope}");
    }

    #[test]
    fn invariant_under_small_ball_rescaling() {
        let s = BandwidthSchedule::<f64>::new(1.0, 0.25).unwrap();
        let c = AsymptoticConstants::<f64>::power_law(&Kernel::Uniform, &s, 1.0, 0.5).unwrap();
        let p = PointInputs {
            zeta_prime: 0.7,
            sigma2_eps: 0.4,
            f1: 2.0,
            r_chi: 0.3,
        };
        let base = predict(&c, &p, 5000, 0.05, 0.05).unwrap();
        for k in [0.1, 10.0] {
            let q = PointInputs { f1: p.f1 * k, ..p };
            let t = predict(&c, &q, 5000, 0.05, 0.05 / k).unwrap();
            for (x, y) in [
                (base.mse_n, t.mse_n),
                (base.var_fn, t.var_fn),
                (base.var_phin, t.var_phin),
                (base.cov_n, t.cov_n),
                (base.bias_n, t.bias_n),
            ] {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn prediction_invariants() {
        let s = BandwidthSchedule::<f64>::new(0.5, 0.3).unwrap();
        let c = AsymptoticConstants::<f64>::power_law(&Kernel::Uniform, &s, 1.0, 1.0).unwrap();
        let p = PointInputs {
            zeta_prime: 1.0,
            sigma2_eps: 0.5,
            f1: 2.0,
            r_chi: 0.0,
        };
        let t = predict(&c, &p, 1000, s.h(1000), s.h(1000)).unwrap();
        assert!(t.mse_n >= t.bias_n * t.bias_n);
        let v = v_ell(&c, 0.5, 2.0).unwrap();
        assert!((t.as_bound - 2.0 / c.m.m1 * (1.0 + v)).abs() < 1e-15);
        assert!(t.as_bound > 0.0);
    }
}
