use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use funrec::smallball::SmallBallJson;
use serde::Serialize;

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: u64,
    pub replication: usize,
    pub point: usize,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryRow {
    /// `None` for rows that aggregate over `n` (slopes, monotonicity).
    pub n: Option<u64>,
    pub point: usize,
    pub metric: String,
    pub empirical: Option<f64>,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
    pub mc_se: Option<f64>,
    pub count: usize,
    /// Whether the ratio is within the configured slack, where one applies.
    pub within: Option<bool>,
}

impl SummaryRow {
    pub fn new(n: Option<u64>, point: usize, metric: impl Into<String>) -> Self {
        Self {
            n,
            point,
            metric: metric.into(),
            ..Default::default()
        }
    }

    pub fn empirical(mut self, v: f64, se: Option<f64>, count: usize) -> Self {
        self.empirical = Some(v);
        self.mc_se = se;
        self.count = count;
        self
    }

    pub fn predicted(mut self, p: Option<f64>) -> Self {
        self.predicted = p;
        self.ratio = match (self.empirical, p) {
            (Some(e), Some(p)) if p != 0.0 => Some(e / p),
            _ => None,
        };
        self
    }

    pub fn within(mut self, ok: Option<bool>) -> Self {
        self.within = ok;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub series: String,
    pub x: f64,
    pub y: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub study: &'static str,
    pub results: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub plots: Vec<PlotRow>,
    /// Small-ball model per query point.
    pub smallball: Vec<SmallBallJson>,
}

impl StudyReport {
    pub fn find(&self, n: Option<u64>, point: usize, metric: &str) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.n == n && r.point == point && r.metric == metric)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Creates `dir` and confirms it is writable; run before any computation.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let probe = dir.join(".funrec-write-probe");
    File::create(&probe)
        .and_then(|mut f| f.write_all(b"ok"))
        .map_err(|e| CliError::Io(format!("{} is not writable: {e}", dir.display())))?;
    fs::remove_file(&probe)?;
    Ok(())
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results(report: &StudyReport, dir: &Path) -> Result<()> {
    write_csv(
        &dir.join("results.csv"),
        &["study", "n", "replication", "point", "metric", "value"],
        report.results.iter().map(|r| {
            vec![
                report.study.to_string(),
                r.n.to_string(),
                r.replication.to_string(),
                r.point.to_string(),
                r.metric.clone(),
                r.value.to_string(),
            ]
        }),
    )
}

pub fn write_summary(report: &StudyReport, dir: &Path) -> Result<()> {
    write_csv(
        &dir.join("summary.csv"),
        &[
            "study",
            "n",
            "point",
            "metric",
            "empirical",
            "predicted",
            "ratio",
            "mc_se",
            "count",
            "within",
        ],
        report.summary.iter().map(|r| {
            vec![
                report.study.to_string(),
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                r.point.to_string(),
                r.metric.clone(),
                opt(r.empirical),
                opt(r.predicted),
                opt(r.ratio),
                opt(r.mc_se),
                r.count.to_string(),
                r.within.map(|b| b.to_string()).unwrap_or_default(),
            ]
        }),
    )
}

pub fn write_plots(report: &StudyReport, dir: &Path) -> Result<()> {
    write_csv(
        &dir.join("plots.csv"),
        &["series", "x", "y", "lo", "hi"],
        report.plots.iter().map(|p| {
            vec![
                p.series.clone(),
                p.x.to_string(),
                p.y.to_string(),
                opt(p.lo),
                opt(p.hi),
            ]
        }),
    )
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `smallball.json` for point 0 and `smallball_<j>.json` for the rest.
pub fn write_smallball(report: &StudyReport, dir: &Path) -> Result<()> {
    for (j, m) in report.smallball.iter().enumerate() {
        let name = if j == 0 {
            "smallball.json".to_string()
        } else {
            format!("smallball_{j}.json")
        };
        write_json(&dir.join(name), m)?;
    }
    Ok(())
}
