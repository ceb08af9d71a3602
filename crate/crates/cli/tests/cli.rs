use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use funrec::{BandwidthSchedule64, Kernel64, SemiNorm, SmallBallModel64};
use funrec_cli::{
    evaluate_study, run_study, EstimatorSpec, ExperimentConfig, ScenarioRef, Slack, StudyKind,
    WeightMode,
};
use funrec_simlab::{
    NoiseSpec, ProcessKind, ProcessSpec, QuerySpec, RegressionOperator, ScalarMap, Scenario,
};
use tempfile::TempDir;

fn funrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funrec"))
        .args(args)
        .output()
        .expect("spawn funrec")
}

fn scalar_scenario(map: ScalarMap) -> Scenario {
    Scenario::new(
        ProcessSpec::scalar_uniform(),
        RegressionOperator::Level(map),
        NoiseSpec::gaussian(1.0),
        QuerySpec::Levels { levels: vec![0.5] },
        3,
    )
    .unwrap()
}

fn small_config(study: StudyKind, a: f64, ell: f64, out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        scenario: ScenarioRef::Inline(Box::new(scalar_scenario(ScalarMap::Linear {
            slope: 1.0,
            intercept: 0.0,
        }))),
        estimator: EstimatorSpec {
            ell,
            kernel: Kernel64::Uniform,
            seminorm: SemiNorm::L2,
            schedule: BandwidthSchedule64::new(0.25, a).unwrap(),
            smallball: None,
            truncation: None,
        },
        n_grid: vec![200, 400, 800],
        replications: 40,
        study,
        output_dir: out.to_path_buf(),
        master_seed: 9,
        weights: WeightMode::Oracle,
        n_pilot: 500,
        slack: Slack::default(),
        theory: None,
        max_undefined: 0.2,
    }
}

fn write_config(dir: &Path, cfg: &ExperimentConfig) -> PathBuf {
    let path = dir.join("experiment.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn run_writes_all_report_files() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cfg_path = write_config(
        tmp.path(),
        &small_config(StudyKind::MseDecay, 0.25, 0.0, &out),
    );
    let o = funrec(&[
        "run",
        "--study",
        "mse-decay",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "results.csv",
        "summary.csv",
        "plots.csv",
        "config.json",
        "smallball.json",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(results.starts_with("study,n,replication,point,metric,value\n"));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(
        lines.next().unwrap(),
        "study,n,point,metric,empirical,predicted,ratio,mc_se,count,within"
    );
    let mse_rows: Vec<&str> = lines
        .filter(|l| l.split(',').nth(3) == Some("mse"))
        .collect();
    assert_eq!(mse_rows.len(), 3);

    let prov: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(prov["replication_seeds"].as_array().unwrap().len(), 40);
    assert!(prov["git_describe"].is_string());
    assert!(prov["config"]["scenario"]["process"].is_object());
    let sb: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("smallball.json")).unwrap()).unwrap();
    assert_eq!(sb["gamma"], 1.0);
    assert_eq!(sb["C"], 2.0);
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run_study(&small_config(StudyKind::VarianceCheck, 0.25, 0.5, &a)).unwrap();
    run_study(&small_config(StudyKind::VarianceCheck, 0.25, 0.5, &b)).unwrap();
    for f in ["results.csv", "summary.csv", "plots.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn predictions_depend_on_config_only() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(StudyKind::MseDecay, 0.25, 0.0, tmp.path());
    let mut other = cfg.clone();
    other.master_seed = 12_345;
    other.replications = 10;
    let (_, r1) = evaluate_study(&cfg).unwrap();
    let (_, r2) = evaluate_study(&other).unwrap();
    for n in [200u64, 400, 800] {
        let p1 = r1.find(Some(n), 0, "mse").unwrap().predicted.unwrap();
        let p2 = r2.find(Some(n), 0, "mse").unwrap().predicted.unwrap();
        assert_eq!(p1, p2);
        // Zero bias at a symmetric linear point; variance (β[1]/β[1]²)·σ²/(f1·n·h_n), β[1] = 4/3.
        let h_n = 0.25 * (n as f64).powf(-0.25);
        let hand = 0.75 / (2.0 * n as f64 * h_n);
        assert!((p1 / hand - 1.0).abs() < 1e-12, "{p1} vs {hand}");
    }
}

#[test]
fn doubling_replications_shrinks_error_bar() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_config(StudyKind::MseDecay, 0.25, 0.0, tmp.path());
    cfg.n_grid = vec![400];
    cfg.replications = 400;
    let (_, small) = evaluate_study(&cfg).unwrap();
    cfg.replications = 800;
    let (_, large) = evaluate_study(&cfg).unwrap();
    let se_small = small.find(Some(400), 0, "mse").unwrap().mc_se.unwrap();
    let se_large = large.find(Some(400), 0, "mse").unwrap().mc_se.unwrap();
    let ratio = se_small / se_large;
    assert!((ratio - 2f64.sqrt()).abs() < 0.25, "{ratio}");
}

#[test]
fn empty_n_grid_exits_with_config_error() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_config(StudyKind::MseDecay, 0.25, 0.0, &tmp.path().join("out"));
    cfg.n_grid.clear();
    let path = write_config(tmp.path(), &cfg);
    let o = funrec(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!tmp.path().join("out").join("results.csv").exists());
}

#[test]
fn malformed_config_exits_with_config_error() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.json");
    fs::write(&path, "{\"n_grid\": [").unwrap();
    assert_eq!(
        code(&funrec(&["run", "--config", path.to_str().unwrap()])),
        2
    );
}

#[test]
fn infeasible_hypothesis_exits_with_code_3() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(StudyKind::AsBoundCheck, 0.4, 1.0, &tmp.path().join("out"));
    let path = write_config(tmp.path(), &cfg);
    let o = funrec(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    // a > 1/2 but ℓ = 0 leaves α[0] divergent under γ = 1.
    let cfg = small_config(StudyKind::AsBoundCheck, 0.6, 0.0, &tmp.path().join("out"));
    let path = write_config(tmp.path(), &cfg);
    let o = funrec(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
}

#[test]
fn unwritable_output_exits_with_io_error() {
    let tmp = TempDir::new().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = small_config(StudyKind::MseDecay, 0.25, 0.0, &blocker.join("out"));
    let path = write_config(tmp.path(), &cfg);
    assert_eq!(
        code(&funrec(&["run", "--config", path.to_str().unwrap()])),
        4
    );
}

#[test]
fn constants_subcommand_reports_closed_forms() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("c.json");
    fs::write(&path, r#"{"kernel": "uniform", "gamma": 2.0}"#).unwrap();
    let o = funrec(&["constants", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let value = |q: &str| -> f64 {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{q},")))
            .unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!((value("M0") - 2.0 / 3.0).abs() < 1e-8);
    assert!((value("M1") - 1.0).abs() < 1e-8);
    assert!((value("M2") - 1.0).abs() < 1e-8);
}

fn split_csv(src: &Path, k: usize, head: &Path, tail: &Path) {
    let text = fs::read_to_string(src).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let rows: Vec<&str> = lines.collect();
    let join = |rs: &[&str]| format!("{header}\n{}\n", rs.join("\n"));
    fs::write(head, join(&rows[..k])).unwrap();
    fs::write(tail, join(&rows[k..])).unwrap();
}

#[test]
fn simulate_fit_and_resume_from_snapshot() {
    let tmp = TempDir::new().unwrap();
    let p = |name: &str| tmp.path().join(name);
    let s = |path: &PathBuf| path.to_str().unwrap().to_string();
    let scenario = Scenario::new(
        ProcessSpec::new(ProcessKind::FunctionalAr1 { rho_ar: 0.5 }),
        RegressionOperator::Integral,
        NoiseSpec::gaussian(0.2),
        QuerySpec::Zero,
        5,
    )
    .unwrap();
    fs::write(p("s.json"), scenario.to_json().unwrap()).unwrap();
    let o = funrec(&[
        "simulate",
        "--scenario",
        &s(&p("s.json")),
        "--n",
        "600",
        "--out",
        &s(&p("d.csv")),
        "--points-out",
        &s(&p("pts.csv")),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(p("d.csv")).unwrap().lines().count(), 601);

    let spec = EstimatorSpec {
        ell: 0.5,
        kernel: Kernel64::Uniform,
        seminorm: SemiNorm::L2,
        schedule: BandwidthSchedule64::new(2.0, 0.2).unwrap(),
        smallball: Some(SmallBallModel64::power_law(1.0, 2.0).unwrap()),
        truncation: None,
    };
    fs::write(p("est.json"), serde_json::to_string(&spec).unwrap()).unwrap();
    let (pts, est) = (s(&p("pts.csv")), s(&p("est.json")));
    let fit = |data: &str, out: &str, extra: &[&str]| {
        let mut args = vec![
            "fit", "--data", data, "--points", &pts, "--config", &est, "--out", out,
        ];
        args.extend_from_slice(extra);
        let o = funrec(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    };
    fit(&s(&p("d.csv")), &s(&p("full.csv")), &[]);
    let full = fs::read_to_string(p("full.csv")).unwrap();
    assert!(full.starts_with("point,n,estimate,phi_n,f_n\n0,600,"));

    split_csv(&p("d.csv"), 250, &p("head.csv"), &p("tail.csv"));
    fit(
        &s(&p("head.csv")),
        &s(&p("half.csv")),
        &["--snapshot-out", &s(&p("state.json"))],
    );
    fit(
        &s(&p("tail.csv")),
        &s(&p("resumed.csv")),
        &["--snapshot-in", &s(&p("state.json"))],
    );
    assert_eq!(fs::read_to_string(p("resumed.csv")).unwrap(), full);

    // A snapshot taken under one configuration cannot seed another.
    let mut other = spec.clone();
    other.ell = 1.0;
    fs::write(p("est.json"), serde_json::to_string(&other).unwrap()).unwrap();
    let o = funrec(&[
        "fit",
        "--data",
        &s(&p("tail.csv")),
        "--points",
        &pts,
        "--config",
        &est,
        "--snapshot-in",
        &s(&p("state.json")),
    ]);
    assert_ne!(code(&o), 0);
}

#[test]
fn missing_input_exits_with_io_error() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.json");
    let out = tmp.path().join("d.csv");
    let o = funrec(&[
        "simulate",
        "--scenario",
        missing.to_str().unwrap(),
        "--n",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 4);
}
