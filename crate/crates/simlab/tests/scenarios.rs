use std::sync::Arc;

use funrec::funcore::read_dataset;
use funrec::{Curve64, Grid64, SemiNorm};
use funrec_simlab::{
    estimate_zeta_prime, fit_geometric_decay, lag_autocorrelation, NoiseSpec, ProcessKind,
    ProcessSpec, QuerySpec, RegressionOperator, ScalarMap, Scenario, SimError,
};

fn scalar(map: ScalarMap, sigma: f64, seed: u64) -> Scenario {
    Scenario::new(
        ProcessSpec::scalar_uniform(),
        RegressionOperator::Level(map),
        NoiseSpec::gaussian(sigma),
        QuerySpec::Levels { levels: vec![0.5] },
        seed,
    )
    .unwrap()
}

fn ar1(rho: f64, seed: u64) -> Scenario {
    Scenario::new(
        ProcessSpec::new(ProcessKind::FunctionalAr1 { rho_ar: rho }),
        RegressionOperator::Integral,
        NoiseSpec::gaussian(0.0),
        QuerySpec::Zero,
        seed,
    )
    .unwrap()
}

fn integrals(s: &Scenario, n: usize) -> Vec<f64> {
    s.generate(n)
        .unwrap()
        .observations
        .iter()
        .map(|o| o.y)
        .collect()
}

#[test]
fn ar1_lag_one_correlation() {
    let series = integrals(&ar1(0.5, 2024), 10_000);
    let c1 = lag_autocorrelation(&series, 1);
    assert!((c1 - 0.5).abs() <= 0.05, "lag-1 correlation {c1}");
}

#[test]
fn ar1_correlations_decay_geometrically() {
    for rho in [0.3, 0.5, 0.8] {
        let series = integrals(&ar1(rho, 77), 10_000);
        let corr: Vec<f64> = (1..=10).map(|k| lag_autocorrelation(&series, k)).collect();
        let fitted = fit_geometric_decay(&corr);
        assert!(
            (fitted - rho).abs() <= 0.1,
            "rho {rho}: fitted {fitted}, {corr:?}"
        );
    }
}

#[test]
fn scalar_uniform_levels_pass_kolmogorov() {
    let n = 10_000;
    let mut u: Vec<f64> = scalar(ScalarMap::Square, 0.0, 9)
        .generate(n)
        .unwrap()
        .observations
        .iter()
        .map(|o| o.x.values()[0])
        .collect();
    u.sort_by(f64::total_cmp);
    let d = u
        .iter()
        .enumerate()
        .map(|(k, &x)| ((k + 1) as f64 / n as f64 - x).max(x - k as f64 / n as f64))
        .fold(0.0, f64::max);
    // Asymptotic 1% critical value of the one-sample Kolmogorov statistic.
    let critical = 1.6276 / (n as f64).sqrt();
    assert!(d < critical, "D = {d}, critical {critical}");
}

#[test]
fn gaussian_noise_maximum_grows_like_sqrt_log_n() {
    for seed in 0..20u64 {
        let s = scalar(
            ScalarMap::Linear {
                slope: 0.0,
                intercept: 0.0,
            },
            1.0,
            seed,
        );
        let mut stream = s.stream().unwrap();
        let mut max = 0.0f64;
        let mut n = 0usize;
        for target in [1_000usize, 10_000, 100_000] {
            while n < target {
                max = max.max(stream.next_observation().unwrap().y.abs());
                n += 1;
            }
            let ratio = max / (n as f64).ln().sqrt();
            assert!(
                (0.8..=2.2).contains(&ratio),
                "seed {seed} n {n}: ratio {ratio}"
            );
        }
    }
}

#[test]
fn true_regression_examples() {
    let g = Arc::new(Grid64::uniform(101).unwrap());
    let s = ar1(0.5, 1);
    let one = Curve64::constant(g.clone(), 1.0).unwrap();
    assert!((s.true_regression(&one).unwrap() - 1.0).abs() < 1e-14);
    let mut sq = s.clone();
    sq.operator = RegressionOperator::IntegralOfSquare;
    let id = Curve64::from_fn(g, |t| t).unwrap();
    assert!((sq.true_regression(&id).unwrap() - 1.0 / 3.0).abs() < 2e-5);
    let u = scalar(ScalarMap::Square, 0.0, 1);
    let half = &u.query_points(&u.grid().unwrap()).unwrap()[0];
    assert_eq!(u.true_regression(half).unwrap(), 0.25);
}

fn zeta(map: ScalarMap) -> funrec_simlab::ZetaEstimate {
    let s = scalar(map, 0.0, 31);
    let chi = s.query_points(&s.grid().unwrap()).unwrap().remove(0);
    estimate_zeta_prime(&s, &chi, SemiNorm::Sup, 20_000).unwrap()
}

#[test]
fn zeta_prime_matches_closed_forms() {
    let flat = zeta(ScalarMap::Linear {
        slope: 0.0,
        intercept: 3.0,
    });
    assert!(flat.slope.abs() <= 2.0 * flat.std_error.max(1e-12));

    let linear = zeta(ScalarMap::Linear {
        slope: 1.0,
        intercept: 0.0,
    });
    assert!(linear.slope.abs() <= 2.0 * linear.std_error, "{linear:?}");

    let quad = zeta(ScalarMap::SquaredDeviation { center: 0.5 });
    assert!(quad.slope.abs() < 1e-9, "{quad:?}");

    let abs = zeta(ScalarMap::AbsDeviation { center: 0.5 });
    assert!((abs.slope - 1.0).abs() < 1e-9, "{abs:?}");
}

#[test]
fn zeta_prime_needs_enough_draws() {
    let s = scalar(ScalarMap::Square, 0.0, 1);
    let chi = s.query_points(&s.grid().unwrap()).unwrap().remove(0);
    assert!(matches!(
        estimate_zeta_prime(&s, &chi, SemiNorm::Sup, 500),
        Err(SimError::Validation(_))
    ));
    // DerivL2 vanishes on constant curves, so every distance is 0.
    assert!(matches!(
        estimate_zeta_prime(&s, &chi, SemiNorm::DerivL2, 10_000),
        Err(SimError::Precision(_))
    ));
}

#[test]
fn dataset_export_roundtrips() {
    let s = ar1(0.5, 3);
    let d = s.generate(25).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    funrec::funcore::write_dataset(&d, std::fs::File::create(&path).unwrap()).unwrap();
    let back = read_dataset::<f64, _>(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back.len(), 25);
    for (a, b) in d.observations.iter().zip(&back.observations) {
        assert_eq!(a.y.to_bits(), b.y.to_bits());
        assert_eq!(a.x.values(), b.x.values());
    }
}

#[test]
fn scenario_files_roundtrip() {
    let s = scalar(ScalarMap::AbsDeviation { center: 0.5 }, 0.1, 8);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, s.to_json().unwrap()).unwrap();
    assert_eq!(Scenario::load(&path).unwrap(), s);
}
