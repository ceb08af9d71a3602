//! Implementations behind the `constants`, `simulate` and `fit` subcommands.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use funrec::asymconst::{alpha_limit, beta_limit, m_constants};
use funrec::funcore::{read_curves, read_dataset, write_dataset};
use funrec::smallball::fit_powerlaw;
use funrec::{
    BandwidthSchedule64, Curve64, Dataset64, Kernel64, RecursiveEstimator64, SmallBallModel64,
    StateSnapshot, TauModel64,
};
use funrec_simlab::Scenario;
use serde::Deserialize;

use crate::config::{EstimatorSpec, ExperimentConfig, StudyKind};
use crate::{CliError, Context, Result};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Input of the `constants` subcommand.
#[derive(Debug, Clone, Deserialize)]
pub struct ConstantsConfig {
    #[serde(default = "uniform")]
    pub kernel: Kernel64,
    /// `τ₀`; defaults to `s^γ`.
    #[serde(default)]
    pub tau: Option<TauModel64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub ell: Option<f64>,
    #[serde(default)]
    pub schedule: Option<BandwidthSchedule64>,
    #[serde(default)]
    pub r_list: Option<Vec<f64>>,
}

fn uniform() -> Kernel64 {
    Kernel64::Uniform
}

/// One line of the constants table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRow {
    pub quantity: String,
    pub value: Option<f64>,
    pub status: String,
}

fn row(quantity: String, r: funrec::Result<f64>) -> ConstantRow {
    match r {
        Ok(v) => ConstantRow {
            quantity,
            value: Some(v),
            status: "ok".into(),
        },
        Err(e) => ConstantRow {
            quantity,
            value: None,
            status: e.to_string(),
        },
    }
}

impl ConstantsConfig {
    /// Accepts either a constants config or a full experiment config.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        if raw.get("estimator").is_none() {
            return Ok(serde_json::from_value(raw)?);
        }
        let mut exp: ExperimentConfig = serde_json::from_value(raw)?;
        exp.study = StudyKind::Constants;
        let ctx = Context::new(&exp)?;
        Ok(Self {
            kernel: exp.estimator.kernel.clone(),
            tau: None,
            gamma: ctx.points.iter().find_map(|p| p.gamma),
            ell: Some(exp.estimator.ell),
            schedule: Some(exp.estimator.schedule),
            r_list: None,
        })
    }

    pub fn table(&self) -> Result<Vec<ConstantRow>> {
        let tau = match (&self.tau, self.gamma) {
            (Some(t), _) => t.clone(),
            (None, Some(g)) => TauModel64::power_law(g)?,
            (None, None) => return Err(CliError::Config("constants need tau or gamma".into())),
        };
        self.kernel.validate()?;
        let m = m_constants(&self.kernel, &tau)?;
        let mut rows = vec![
            row("M0".into(), Ok(m.m0)),
            row("M1".into(), Ok(m.m1)),
            row("M2".into(), Ok(m.m2)),
        ];
        if let (Some(s), Some(g)) = (&self.schedule, self.gamma) {
            let ell = self.ell.unwrap_or(0.0);
            rows.push(row(format!("alpha[{ell}]"), alpha_limit(s, g, ell)));
            let rs = self.r_list.clone().unwrap_or_else(|| {
                let mut v = vec![1.0 - ell, 1.0 - 2.0 * ell, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0];
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            });
            for r in rs {
                rows.push(row(format!("beta[{r}]"), beta_limit(s, g, r)));
            }
        }
        Ok(rows)
    }
}

pub fn write_constants(rows: &[ConstantRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["quantity", "value", "status"])?;
    for r in rows {
        w.write_record([
            r.quantity.clone(),
            r.value.map(|v| v.to_string()).unwrap_or_default(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn constants(config: &Path, out: Option<&Path>) -> Result<Vec<ConstantRow>> {
    let rows = ConstantsConfig::from_json(&read_text(config)?)?.table()?;
    match out {
        Some(p) => write_constants(&rows, create(p)?)?,
        None => write_constants(&rows, std::io::stdout().lock())?,
    }
    Ok(rows)
}

/// `funrec simulate`: writes `n` observations in the dataset CSV format and,
/// optionally, the scenario's query curves in the same format without `y`.
pub fn simulate(
    scenario: &Path,
    n: usize,
    out: &Path,
    seed: Option<u64>,
    points_out: Option<&Path>,
) -> Result<Dataset64> {
    if n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    let mut s = Scenario::from_json(&read_text(scenario)?)?;
    if let Some(seed) = seed {
        s = s.with_seed(seed);
    }
    let file = create(out)?;
    if let Some(p) = points_out {
        let f = create(p)?;
        let grid = s.grid()?;
        write_points(&s.query_points(&grid)?, f)?;
    }
    let data = s.generate(n)?;
    write_dataset(&data, file)?;
    Ok(data)
}

fn write_points(points: &[Curve64], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = points.first() {
        let header: Vec<String> = first
            .grid()
            .points()
            .iter()
            .map(|t| t.to_string())
            .collect();
        w.write_record(&header)?;
    }
    for p in points {
        w.write_record(p.values().iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// `funrec fit` options beyond the three required paths.
#[derive(Debug, Clone, Default)]
pub struct FitOptions<'a> {
    pub out: Option<&'a Path>,
    pub snapshot_in: Option<&'a Path>,
    pub snapshot_out: Option<&'a Path>,
    pub n_pilot: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub point: usize,
    pub n: u64,
    pub estimate: Option<f64>,
    pub phi_n: Option<f64>,
    pub f_n: Option<f64>,
}

/// Streams `data` through a fresh (or restored) estimator at `points`.
pub fn fit(data: &Path, points: &Path, config: &Path, opts: &FitOptions) -> Result<Vec<FitRow>> {
    let spec: EstimatorSpec = serde_json::from_str(&read_text(config)?)?;
    let data = read_dataset::<f64, _>(open(data)?)?;
    let (pgrid, pcurves) = read_curves::<f64, _>(open(points)?)?;
    if *pgrid != *data.grid {
        return Err(CliError::Config(
            "points and data use different grids".into(),
        ));
    }
    let curves = pcurves
        .iter()
        .map(|c| Curve64::new(data.grid.clone(), c.values().to_vec()))
        .collect::<funrec::Result<Vec<_>>>()?;
    let model = match &spec.smallball {
        Some(m) => m.clone(),
        None if opts.snapshot_in.is_some() => {
            return Err(CliError::Config(
                "resuming from a snapshot needs an explicit smallball model".into(),
            ))
        }
        None => plugin_model(&spec, &data, &curves[0], opts.n_pilot.unwrap_or(2000))?,
    };
    let cfg = spec.with_model(model)?;
    let mut est = match opts.snapshot_in {
        Some(p) => StateSnapshot::<f64>::from_json(&read_text(p)?)?.restore(cfg, curves)?,
        None => RecursiveEstimator64::register_points(cfg, curves)?,
    };
    est.absorb(&data.observations)?;
    if let Some(p) = opts.snapshot_out {
        fs::write(p, StateSnapshot::capture(&est).to_json()?)
            .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    let rows = (0..est.len())
        .map(|j| {
            Ok(FitRow {
                point: j,
                n: est.n(),
                estimate: est.evaluate(j)?.value(),
                phi_n: est.phi_n(j)?,
                f_n: est.f_n(j)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    match opts.out {
        Some(p) => write_fit(&rows, create(p)?)?,
        None => write_fit(&rows, std::io::stdout().lock())?,
    }
    Ok(rows)
}

fn plugin_model(
    spec: &EstimatorSpec,
    data: &Dataset64,
    chi: &Curve64,
    n_pilot: usize,
) -> Result<SmallBallModel64> {
    let d = data
        .observations
        .iter()
        .take(n_pilot)
        .map(|o| spec.seminorm.dist(&o.x, chi))
        .collect::<funrec::Result<Vec<_>>>()?;
    let fit = fit_powerlaw(&d, (0.05, 0.5))?;
    Ok(SmallBallModel64::power_law(1.0, fit.gamma)?)
}

fn write_fit(rows: &[FitRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["point", "n", "estimate", "phi_n", "f_n"])?;
    let s = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.point.to_string(),
            r.n.to_string(),
            s(r.estimate),
            s(r.phi_n),
            s(r.f_n),
        ])?;
    }
    w.flush()?;
    Ok(())
}
