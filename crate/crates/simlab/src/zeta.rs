use funrec::{Curve64, SemiNorm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{splitmix64, Result, Scenario, SimError};

const ZETA_STREAM: u64 = 0x2545_f491_4f6c_dd1d;
const BAND_FRACTION: f64 = 0.05;
const MIN_BAND: usize = 50;
const BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaEstimate {
    pub slope: f64,
    pub std_error: f64,
    /// Largest distance in the fitting band.
    pub band_radius: f64,
    pub n_band: usize,
}

/// `b₁` in the least-squares fit `d ≈ b₁ t + b₂ t²` through the origin.
fn fit_slope(pairs: &[(f64, f64)], idx: impl Iterator<Item = usize>) -> Option<f64> {
    let (mut s11, mut s12, mut s22, mut s1y, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in idx {
        let (t, d) = pairs[k];
        let t2 = t * t;
        s11 += t * t;
        s12 += t * t2;
        s22 += t2 * t2;
        s1y += t * d;
        s2y += t2 * d;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > 1e-12 * s11 * s22) {
        return None;
    }
    Some((s22 * s1y - s12 * s2y) / det)
}

/// Monte Carlo estimate of `ζ'(0)` at `chi` with a bootstrap standard error.
///
/// Regresses `r(X) − r(χ)` on `t = ‖X − χ‖` over the 5% of draws closest to
/// `chi`; the quadratic term absorbs curvature so the slope is read at 0.
pub fn estimate_zeta_prime(
    s: &Scenario,
    chi: &Curve64,
    seminorm: SemiNorm,
    n_mc: usize,
) -> Result<ZetaEstimate> {
    if n_mc < 10_000 {
        return Err(SimError::Validation(format!(
            "n_mc must be at least 10000, got {n_mc}"
        )));
    }
    let r_chi = s.true_regression(chi)?;
    let mut stream = s
        .with_seed(splitmix64(s.seed ^ ZETA_STREAM))
        .stream_on(chi.grid().clone())?;
    let mut pairs = Vec::with_capacity(n_mc);
    for _ in 0..n_mc {
        let x = stream.next_covariate()?;
        let t = seminorm.dist(&x, chi)?;
        pairs.push((t, s.true_regression(&x)? - r_chi));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n_band = ((n_mc as f64 * BAND_FRACTION).ceil() as usize).min(n_mc);
    pairs.truncate(n_band);
    let band_radius = pairs.last().map_or(0.0, |p| p.0);
    let positive = pairs.iter().filter(|p| p.0 > 0.0).count();
    if positive < MIN_BAND {
        return Err(SimError::Precision(format!(
            "only {positive} samples with positive distance in the band [0, {band_radius}]"
        )));
    }
    let slope = fit_slope(&pairs, 0..n_band).ok_or_else(|| {
        SimError::Precision(format!(
            "degenerate distances in the band [0, {band_radius}]"
        ))
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(s.seed ^ ZETA_STREAM ^ 1));
    let boots: Vec<f64> = (0..BOOTSTRAP)
        .filter_map(|_| {
            let idx: Vec<usize> = (0..n_band).map(|_| rng.random_range(0..n_band)).collect();
            fit_slope(&pairs, idx.into_iter())
        })
        .collect();
    let mean = boots.iter().sum::<f64>() / boots.len() as f64;
    let var = boots.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (boots.len() as f64 - 1.0);
    Ok(ZetaEstimate {
        slope,
        std_error: var.sqrt(),
        band_radius,
        n_band,
    })
}
