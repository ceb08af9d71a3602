use serde::{Deserialize, Serialize};

use crate::funcore::CompensatedSum;
use crate::{Error, Result, Scalar};

use super::BandwidthSchedule;

/// A Cesàro sum whose limit is infinite under the power-law schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum H4Violation<T> {
    /// `a + aγ(1−ℓ) ≥ 1`.
    Alpha { exponent: T },
    /// `aγr ≥ 1`.
    Beta { r: T, exponent: T },
}

/// Exact finite-`n` values of `A_{n,ℓ}` and `B_{n,r}` under `φ(h) = h^γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSums<T> {
    pub n: u64,
    pub ell: T,
    pub a_n: T,
    pub b_n: Vec<(T, T)>,
    /// Limits that do not exist; the finite values above are still valid.
    pub violations: Vec<H4Violation<T>>,
}

fn alpha_exponent<T: Scalar>(sched: &BandwidthSchedule<T>, gamma: T, ell: T) -> T {
    sched.a + sched.a * gamma * (T::one() - ell)
}

fn check_ell<T: Scalar>(ell: T) -> Result<()> {
    if ell >= T::zero() && ell <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("ell must lie in [0, 1], got {ell}")))
    }
}

fn check_gamma<T: Scalar>(gamma: T) -> Result<()> {
    if gamma.is_finite() && gamma > T::zero() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "gamma must be positive, got {gamma}"
        )))
    }
}

/// Brute-force `A_{n,ℓ} = (1/n) Σ (h_i/h_n) [φ(h_i)/φ(h_n)]^{1−ℓ}` and
/// `B_{n,r} = (1/n) Σ [φ(h_i)/φ(h_n)]^r` for each `r` in `r_list`.
pub fn finite_sequences<T: Scalar>(
    sched: &BandwidthSchedule<T>,
    gamma: T,
    n: u64,
    ell: T,
    r_list: &[T],
) -> Result<SequenceSums<T>> {
    sched.validate()?;
    check_gamma(gamma)?;
    check_ell(ell)?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if let Some(r) = r_list.iter().find(|r| !(**r <= T::lit(2.0))) {
        return Err(Error::domain(format!("r must be <= 2, got {r}")));
    }
    let h_n = sched.h(n);
    let mut a_acc = CompensatedSum::new();
    let mut b_acc = vec![CompensatedSum::new(); r_list.len()];
    for i in 1..=n {
        let ratio = sched.h(i) / h_n;
        let phi_ratio = ratio.powf(gamma);
        a_acc.add(ratio * phi_ratio.powf(T::one() - ell));
        for (acc, &r) in b_acc.iter_mut().zip(r_list) {
            acc.add(phi_ratio.powf(r));
        }
    }
    let nn = T::from_count(n);
    let mut violations = Vec::new();
    let pa = alpha_exponent(sched, gamma, ell);
    if pa >= T::one() {
        violations.push(H4Violation::Alpha { exponent: pa });
    }
    for &r in r_list {
        let pb = sched.a * gamma * r;
        if pb >= T::one() {
            violations.push(H4Violation::Beta { r, exponent: pb });
        }
    }
    Ok(SequenceSums {
        n,
        ell,
        a_n: a_acc.value() / nn,
        b_n: r_list
            .iter()
            .zip(b_acc)
            .map(|(&r, acc)| (r, acc.value() / nn))
            .collect(),
        violations,
    })
}

/// `α[ℓ] = 1 / (1 − a − aγ(1−ℓ))`.
pub fn alpha_limit<T: Scalar>(sched: &BandwidthSchedule<T>, gamma: T, ell: T) -> Result<T> {
    sched.validate()?;
    check_gamma(gamma)?;
    check_ell(ell)?;
    let p = alpha_exponent(sched, gamma, ell);
    if p >= T::one() {
        return Err(Error::Divergent(format!(
            "alpha[{ell}] needs a + a*gamma*(1-ell) < 1, got {p}"
        )));
    }
    Ok(T::one() / (T::one() - p))
}

/// `β[r] = 1 / (1 − aγr)` for `r ≤ 2`.
pub fn beta_limit<T: Scalar>(sched: &BandwidthSchedule<T>, gamma: T, r: T) -> Result<T> {
    sched.validate()?;
    check_gamma(gamma)?;
    if !(r <= T::lit(2.0)) {
        return Err(Error::domain(format!("r must be <= 2, got {r}")));
    }
    let p = sched.a * gamma * r;
    if p >= T::one() {
        return Err(Error::Divergent(format!(
            "beta[{r}] needs a*gamma*r < 1, got {p}"
        )));
    }
    Ok(T::one() / (T::one() - p))
}

/// `(α[ℓ], β[r])`.
pub fn limits<T: Scalar>(sched: &BandwidthSchedule<T>, gamma: T, ell: T, r: T) -> Result<(T, T)> {
    Ok((
        alpha_limit(sched, gamma, ell)?,
        beta_limit(sched, gamma, r)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain f64 loop over `(n/i)^p`.
    fn riemann_power_sum(n: u64, p: f64) -> f64 {
        (1..=n).map(|i| (n as f64 / i as f64).powf(p)).sum::<f64>() / n as f64
    }

    #[test]
    fn b_zero_is_one() {
        let s = BandwidthSchedule::<f64>::new(0.3, 0.4).unwrap();
        for n in [1, 7, 1000] {
            let seq = finite_sequences(&s, 1.7, n, 0.5, &[0.0]).unwrap();
            assert!((seq.b_n[0].1 - 1.0).abs() < 1e-14);
        }
        assert_eq!(beta_limit(&s, 1.7, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn b_one_converges_to_two() {
        let s = BandwidthSchedule::<f64>::new(1.0, 0.25).unwrap();
        let n = 100_000;
        let seq = finite_sequences(&s, 2.0, n, 0.0, &[1.0]).unwrap();
        let oracle = riemann_power_sum(n, 0.5);
        assert!((seq.b_n[0].1 - oracle).abs() < 1e-9);
        assert!((seq.b_n[0].1 - 2.0).abs() < 1e-2);
        assert_eq!(beta_limit(&s, 2.0, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn a_one_converges_to_five_quarters() {
        let s = BandwidthSchedule::<f64>::new(0.7, 0.2).unwrap();
        let n = 100_000;
        let seq = finite_sequences(&s, 1.0, n, 1.0, &[]).unwrap();
        let oracle = riemann_power_sum(n, 0.2);
        assert!((seq.a_n - oracle).abs() < 1e-9);
        assert!((seq.a_n - 1.25).abs() < 1e-2);
        assert!((alpha_limit(&s, 1.0, 1.0).unwrap() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn finite_sums_approach_limits_monotonically() {
        let s = BandwidthSchedule::<f64>::new(1.0, 0.3).unwrap();
        let (gamma, ell) = (1.5, 0.4);
        let alpha = alpha_limit(&s, gamma, ell).unwrap();
        let beta = beta_limit(&s, gamma, 1.0).unwrap();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for n in [100, 1_000, 10_000, 100_000] {
            let seq = finite_sequences(&s, gamma, n, ell, &[1.0]).unwrap();
            let err = ((seq.a_n - alpha).abs(), (seq.b_n[0].1 - beta).abs());
            assert!(err.0 < prev.0 && err.1 < prev.1);
            prev = err;
        }
    }

    #[test]
    fn beta_nondecreasing_in_r() {
        let s = BandwidthSchedule::<f64>::new(1.0, 0.2).unwrap();
        let rs = [0.0, 0.5, 1.0, 1.5, 2.0];
        let limits: Vec<f64> = rs
            .iter()
            .map(|&r| beta_limit(&s, 1.0, r).unwrap())
            .collect();
        assert!(limits.windows(2).all(|w| w[1] >= w[0]));
        let seq = finite_sequences(&s, 1.0, 5000, 0.0, &rs).unwrap();
        assert!(seq.b_n.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn negative_r_is_supported() {
        let s = BandwidthSchedule::<f64>::new(1.0, 0.5).unwrap();
        let b = beta_limit(&s, 1.0, -1.0).unwrap();
        assert!((b - 1.0 / 1.5).abs() < 1e-15);
        let seq = finite_sequences(&s, 1.0, 50_000, 0.0, &[-1.0]).unwrap();
        assert!((seq.b_n[0].1 - b).abs() < 1e-3);
    }

    #[test]
    fn divergence_is_flagged_not_fatal() {
        let s = BandwidthSchedule::<f64>::new(1.0, 0.6).unwrap();
        let seq = finite_sequences(&s, 1.0, 1000, 0.0, &[2.0]).unwrap();
        assert_eq!(seq.violations.len(), 2);
        assert!(seq.a_n.is_finite());
        let err = alpha_limit(&s, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::Divergent(ref m) if m.contains("a + a*gamma*(1-ell) < 1")));
        assert!(matches!(beta_limit(&s, 1.0, 2.0), Err(Error::Divergent(_))));
        assert!(limits(&s, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn domain_checks() {
        let s = BandwidthSchedule::<f64>::new(1.0, 0.2).unwrap();
        assert!(finite_sequences(&s, 1.0, 0, 0.0, &[]).is_err());
        assert!(finite_sequences(&s, 1.0, 10, 1.5, &[]).is_err());
        assert!(finite_sequences(&s, 1.0, 10, 0.0, &[2.5]).is_err());
    }
}
