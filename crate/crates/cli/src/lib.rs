//! Experiment runner for the functional recursive estimators.
//!
//! A study is a pure function of its [`ExperimentConfig`]: replication `r`
//! streams the scenario under seed `replication_seed(master_seed, r)`, and
//! every output file except the provenance record is byte-reproducible.

pub mod commands;
pub mod config;
pub mod engine;
mod error;
pub mod report;
pub mod stats;
pub mod studies;

use std::path::Path;
use std::process::Command;

use serde::Serialize;

pub use config::{
    EstimatorSpec, ExperimentConfig, ScenarioRef, Slack, StudyKind, TheoryInputs, WeightMode,
};
pub use engine::Context;
pub use error::{CliError, Result};
pub use report::{StudyReport, SummaryRow};

/// Runs the configured study without touching the filesystem.
pub fn evaluate_study(cfg: &ExperimentConfig) -> Result<(Context, StudyReport)> {
    let ctx = Context::new(cfg)?;
    let report = if cfg.study == StudyKind::Constants {
        studies::constants_report(&ctx)?
    } else {
        let reps = ctx.run()?;
        studies::build(&ctx, &reps)?
    };
    Ok((ctx, report))
}

#[derive(Serialize)]
struct Provenance<'a> {
    funrec_version: &'static str,
    git_describe: String,
    study: &'static str,
    scenario_label: &'a str,
    config: ExperimentConfig,
    replication_seeds: Vec<u64>,
    estimator_config_hashes: Vec<Option<String>>,
}

fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".to_string())
}

/// Runs the study and writes `results.csv`, `summary.csv`, `plots.csv`,
/// `config.json` and `smallball.json` into `cfg.output_dir`.
pub fn run_study(cfg: &ExperimentConfig) -> Result<StudyReport> {
    let dir = cfg.output_dir.clone();
    report::ensure_writable(&dir)?;
    let (ctx, report) = evaluate_study(cfg)?;
    write_outputs(&ctx, &report, &dir)?;
    Ok(report)
}

fn write_outputs(ctx: &Context, report: &StudyReport, dir: &Path) -> Result<()> {
    report::write_results(report, dir)?;
    report::write_summary(report, dir)?;
    report::write_plots(report, dir)?;
    report::write_smallball(report, dir)?;
    let mut config = ctx.cfg.clone();
    config.scenario = ScenarioRef::Inline(Box::new(ctx.scenario.clone()));
    let hashes = ctx
        .points
        .iter()
        .map(|p| {
            p.oracle_model
                .clone()
                .and_then(|m| ctx.cfg.estimator.with_model(m).ok())
                .map(|c| c.config_hash())
        })
        .collect();
    let prov = Provenance {
        funrec_version: env!("CARGO_PKG_VERSION"),
        git_describe: git_describe(),
        study: report.study,
        scenario_label: &ctx.scenario.label,
        config,
        replication_seeds: if ctx.cfg.study == StudyKind::Constants {
            Vec::new()
        } else {
            ctx.seeds()
        },
        estimator_config_hashes: hashes,
    };
    report::write_json(&dir.join("config.json"), &prov)
}
