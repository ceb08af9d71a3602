use funrec::asymconst::{finite_sequences, predict, PointInputs, TheoryPrediction};
use funrec::smallball::SmallBallJson;

use crate::config::{Mode, StudyKind};
use crate::engine::{Context, Replication, Sample};
use crate::report::{PlotRow, ResultRow, StudyReport, SummaryRow};
use crate::stats::{
    covariance, covariance_std_error, mean, ols_slope, std_error, variance, variance_std_error,
};
use crate::{CliError, Result};

/// Theory at `(point, n)`, computed from the configuration alone.
pub fn prediction(ctx: &Context, point: usize, n: u64) -> Result<Option<TheoryPrediction<f64>>> {
    let (Some(c), Some(t)) = (&ctx.constants, ctx.points[point].theory) else {
        return Ok(None);
    };
    let h_n = ctx.cfg.estimator.schedule.h(n);
    let inputs = PointInputs {
        zeta_prime: t.zeta_prime,
        sigma2_eps: t.sigma2_eps,
        f1: t.f1,
        r_chi: t.r_chi,
    };
    Ok(Some(predict(c, &inputs, n, h_n, h_n.powf(t.gamma))?))
}

fn n_phi(ctx: &Context, point: usize, n: u64) -> Option<f64> {
    let g = ctx.points[point].gamma?;
    Some(n as f64 * ctx.cfg.estimator.schedule.h(n).powf(g))
}

/// `[nφ(h_n) / ln n]^{1/2}`.
fn as_scale(ctx: &Context, point: usize, n: u64) -> Option<f64> {
    (n >= 2).then(|| n_phi(ctx, point, n).map(|v| (v / (n as f64).ln()).sqrt()))?
}

struct Cell<'a> {
    n: u64,
    point: usize,
    prefix: &'static str,
    samples: Vec<(usize, &'a Sample)>,
}

fn cells<'a>(ctx: &Context, reps: &'a [Replication]) -> Vec<Cell<'a>> {
    let mut out = Vec::new();
    for (k, &n) in ctx.cfg.n_grid.iter().enumerate() {
        for point in 0..ctx.points.len() {
            for (m, mode) in ctx.modes.iter().enumerate() {
                out.push(Cell {
                    n,
                    point,
                    prefix: mode.prefix(),
                    samples: reps
                        .iter()
                        .enumerate()
                        .map(|(r, rep)| (r, &rep.samples[k][point][m]))
                        .collect(),
                });
            }
        }
    }
    out
}

fn check_undefined(ctx: &Context, cell: &Cell) -> Result<()> {
    let undefined = cell
        .samples
        .iter()
        .filter(|(_, s)| s.estimate.is_none())
        .count();
    let rate = undefined as f64 / cell.samples.len() as f64;
    if rate > ctx.cfg.max_undefined {
        return Err(CliError::Aborted(format!(
            "{undefined} of {} estimates Undefined at n = {}, point {} ({:.1}% > {:.1}%); \
             h_n = {} is too small for this sample size",
            cell.samples.len(),
            cell.n,
            cell.point,
            100.0 * rate,
            100.0 * ctx.cfg.max_undefined,
            ctx.cfg.estimator.schedule.h(cell.n),
        )));
    }
    Ok(())
}

struct Builder<'c> {
    ctx: &'c Context,
    results: Vec<ResultRow>,
    summary: Vec<SummaryRow>,
}

impl<'c> Builder<'c> {
    fn result(&mut self, cell: &Cell, r: usize, metric: &str, value: f64) {
        self.results.push(ResultRow {
            n: cell.n,
            replication: r,
            point: cell.point,
            metric: format!("{}{metric}", cell.prefix),
            value,
        });
    }

    fn row(&self, cell: &Cell, metric: &str) -> SummaryRow {
        SummaryRow::new(Some(cell.n), cell.point, format!("{}{metric}", cell.prefix))
    }

    fn undefined_rate(&mut self, cell: &Cell) {
        let flags: Vec<f64> = cell
            .samples
            .iter()
            .map(|(_, s)| if s.estimate.is_none() { 1.0 } else { 0.0 })
            .collect();
        let row = self
            .row(cell, "undefined_rate")
            .empirical(mean(&flags), None, flags.len());
        self.summary.push(row);
    }
}

fn within(ratio: Option<f64>, tol: f64) -> Option<bool> {
    ratio.map(|r| (r - 1.0).abs() <= tol)
}

pub fn build(ctx: &Context, reps: &[Replication]) -> Result<StudyReport> {
    let mut b = Builder {
        ctx,
        results: Vec::new(),
        summary: Vec::new(),
    };
    let study = ctx.cfg.study;
    for cell in cells(ctx, reps) {
        let pred = prediction(ctx, cell.point, cell.n)?;
        match study {
            StudyKind::MseDecay => mse_cell(&mut b, &cell, pred)?,
            StudyKind::VarianceCheck => variance_cell(&mut b, &cell, pred),
            StudyKind::AsBoundCheck => as_bound_cell(&mut b, &cell, pred)?,
            StudyKind::BiasCheck => bias_cell(&mut b, &cell, pred),
            StudyKind::TruncationCheck => truncation_cell(&mut b, &cell),
            StudyKind::Constants => unreachable!("constants has no replications"),
        }
    }
    for point in 0..ctx.points.len() {
        for mode in &ctx.modes {
            match study {
                StudyKind::MseDecay => mse_slope(&mut b, point, *mode)?,
                StudyKind::TruncationCheck => gap_monotonicity(&mut b, point, *mode),
                _ => {}
            }
        }
    }
    let mut smallball = Vec::new();
    for (j, p) in ctx.points.iter().enumerate() {
        let fitted = reps.first().and_then(|r| r.gamma_hat[j]);
        smallball.push(match (fitted, &p.oracle_model) {
            (Some(g), _) => SmallBallJson {
                kind: "power_law".into(),
                c: Some(1.0),
                gamma: Some(g),
            },
            (None, Some(m)) => m.to_json(),
            (None, None) => SmallBallJson {
                kind: "unknown".into(),
                c: None,
                gamma: None,
            },
        });
    }
    for (j, _) in ctx.points.iter().enumerate() {
        if ctx.modes.contains(&Mode::Plugin) {
            for (r, rep) in reps.iter().enumerate() {
                if let Some(g) = rep.gamma_hat[j] {
                    b.results.push(ResultRow {
                        n: ctx.cfg.n_pilot.min(ctx.cfg.n_max() as usize) as u64,
                        replication: r,
                        point: j,
                        metric: "plugin.gamma_hat".into(),
                        value: g,
                    });
                }
            }
        }
    }
    let plots = plots(&b.summary);
    Ok(StudyReport {
        study: study.name(),
        results: b.results,
        summary: b.summary,
        plots,
        smallball,
    })
}

fn mse_cell(b: &mut Builder, cell: &Cell, pred: Option<TheoryPrediction<f64>>) -> Result<()> {
    check_undefined(b.ctx, cell)?;
    let r_chi = b.ctx.points[cell.point].r_chi;
    let mut sq = Vec::new();
    for &(r, s) in &cell.samples {
        match s.estimate {
            Some(v) => {
                b.result(cell, r, "estimate", v);
                b.result(cell, r, "sq_error", (v - r_chi).powi(2));
                b.result(cell, r, "undefined", 0.0);
                sq.push((v - r_chi).powi(2));
            }
            None => b.result(cell, r, "undefined", 1.0),
        }
    }
    if !sq.is_empty() {
        let row = b
            .row(cell, "mse")
            .empirical(mean(&sq), Some(std_error(&sq)), sq.len())
            .predicted(pred.map(|p| p.mse_n));
        b.summary.push(row);
    }
    b.undefined_rate(cell);
    Ok(())
}

fn mse_slope(b: &mut Builder, point: usize, mode: Mode) -> Result<()> {
    let metric = format!("{}mse", mode.prefix());
    let mut ln_n = Vec::new();
    let (mut emp, mut pred) = (Vec::new(), Vec::new());
    for row in b
        .summary
        .iter()
        .filter(|r| r.point == point && r.metric == metric)
    {
        let (Some(n), Some(e)) = (row.n, row.empirical) else {
            continue;
        };
        if e > 0.0 {
            ln_n.push((n as f64).ln());
            emp.push(e.ln());
            pred.push(row.predicted.filter(|p| *p > 0.0).map(f64::ln));
        }
    }
    if ln_n.len() < 2 {
        return Ok(());
    }
    let predicted = pred
        .iter()
        .copied()
        .collect::<Option<Vec<f64>>>()
        .map(|p| ols_slope(&ln_n, &p));
    let row = SummaryRow::new(None, point, format!("{metric}_slope"))
        .empirical(ols_slope(&ln_n, &emp), None, ln_n.len())
        .predicted(predicted);
    b.summary.push(row);
    Ok(())
}

fn variance_cell(b: &mut Builder, cell: &Cell, pred: Option<TheoryPrediction<f64>>) {
    let f: Vec<f64> = cell.samples.iter().map(|(_, s)| s.f_n).collect();
    let phi: Vec<f64> = cell.samples.iter().map(|(_, s)| s.phi_n).collect();
    for &(r, s) in &cell.samples {
        b.result(cell, r, "f_n", s.f_n);
        b.result(cell, r, "phi_n", s.phi_n);
    }
    if f.len() < 2 {
        return;
    }
    let slack = b.ctx.cfg.slack;
    let count = f.len();
    let (vf, vp, cv) = (variance(&f), variance(&phi), covariance(&f, &phi));
    let row = b
        .row(cell, "var_fn")
        .empirical(vf, Some(variance_std_error(&f)), count)
        .predicted(pred.map(|p| p.var_fn));
    b.summary.push(row);
    if let Some(scale) = n_phi(b.ctx, cell.point, cell.n) {
        let row = b
            .row(cell, "var_fn_scaled")
            .empirical(vf * scale, Some(variance_std_error(&f) * scale), count)
            .predicted(pred.map(|p| p.var_fn * scale));
        let ok = within(row.ratio, slack.variance);
        b.summary.push(row.within(ok));
    }
    let row = b
        .row(cell, "var_phin")
        .empirical(vp, Some(variance_std_error(&phi)), count)
        .predicted(pred.map(|p| p.var_phin));
    b.summary.push(row);
    let se = covariance_std_error(&f, &phi);
    let row = b
        .row(cell, "cov")
        .empirical(cv, Some(se), count)
        .predicted(pred.map(|p| p.cov_n));
    b.summary.push(row);
    let t = if se > 0.0 { cv / se } else { 0.0 };
    let vanishes = pred.map(|p| p.cov_n == 0.0).unwrap_or(false);
    let row = b
        .row(cell, "cov_t")
        .empirical(t, None, count)
        .predicted(vanishes.then_some(0.0))
        .within(vanishes.then(|| t.abs() <= slack.t_stat));
    b.summary.push(row);
}

fn as_bound_cell(b: &mut Builder, cell: &Cell, pred: Option<TheoryPrediction<f64>>) -> Result<()> {
    check_undefined(b.ctx, cell)?;
    let r_chi = b.ctx.points[cell.point].r_chi;
    let Some(scale) = as_scale(b.ctx, cell.point, cell.n) else {
        b.undefined_rate(cell);
        return Ok(());
    };
    let mut dev = Vec::new();
    for &(r, s) in &cell.samples {
        match s.estimate {
            Some(v) => {
                let d = scale * (v - r_chi).abs();
                b.result(cell, r, "estimate", v);
                b.result(cell, r, "deviation", d);
                b.result(cell, r, "undefined", 0.0);
                dev.push(d);
            }
            None => b.result(cell, r, "undefined", 1.0),
        }
    }
    if !dev.is_empty() {
        let bound = pred.map(|p| p.as_bound);
        let max = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let row = b
            .row(cell, "deviation_max")
            .empirical(max, None, dev.len())
            .predicted(bound);
        b.summary.push(row);
        let row =
            b.row(cell, "deviation_mean")
                .empirical(mean(&dev), Some(std_error(&dev)), dev.len());
        b.summary.push(row);
        if let Some(bound) = bound {
            let limit = b.ctx.cfg.slack.as_bound * bound;
            let over = dev.iter().filter(|d| **d > limit).count();
            let row = b.row(cell, "exceed_fraction").empirical(
                over as f64 / cell.samples.len() as f64,
                None,
                cell.samples.len(),
            );
            b.summary.push(row);
        }
    }
    b.undefined_rate(cell);
    Ok(())
}

fn bias_cell(b: &mut Builder, cell: &Cell, pred: Option<TheoryPrediction<f64>>) {
    let r_chi = b.ctx.points[cell.point].r_chi;
    let f: Vec<f64> = cell.samples.iter().map(|(_, s)| s.f_n).collect();
    let phi: Vec<f64> = cell.samples.iter().map(|(_, s)| s.phi_n).collect();
    for &(r, s) in &cell.samples {
        b.result(cell, r, "f_n", s.f_n);
        b.result(cell, r, "phi_n", s.phi_n);
    }
    let (mf, mp) = (mean(&f), mean(&phi));
    if !(mf > 0.0) || f.len() < 2 {
        return;
    }
    let ratio = mp / mf;
    let var = (variance(&phi) - 2.0 * ratio * covariance(&f, &phi) + ratio * ratio * variance(&f))
        / (f.len() as f64 * mf * mf);
    let predicted = pred.map(|p| p.bias_n);
    let row = b
        .row(cell, "bias")
        .empirical(ratio - r_chi, Some(var.max(0.0).sqrt()), f.len())
        .predicted(predicted.filter(|p| *p != 0.0));
    let ok = within(row.ratio, b.ctx.cfg.slack.bias);
    let row = SummaryRow {
        predicted,
        ..row.within(ok)
    };
    b.summary.push(row);
}

fn truncation_cell(b: &mut Builder, cell: &Cell) {
    let scale = as_scale(b.ctx, cell.point, cell.n);
    let (mut gaps, mut scaled) = (Vec::new(), Vec::new());
    for &(r, s) in &cell.samples {
        if let Some(g) = s.gap {
            b.result(cell, r, "gap", g);
            gaps.push(g);
            if let Some(k) = scale {
                b.result(cell, r, "scaled_gap", g * k);
                scaled.push(g * k);
            }
        }
    }
    if gaps.len() >= 2 {
        let row =
            b.row(cell, "gap_mean")
                .empirical(mean(&gaps), Some(std_error(&gaps)), gaps.len());
        b.summary.push(row);
    }
    if scaled.len() >= 2 {
        let row = b.row(cell, "scaled_gap_mean").empirical(
            mean(&scaled),
            Some(std_error(&scaled)),
            scaled.len(),
        );
        b.summary.push(row);
    }
}

fn gap_monotonicity(b: &mut Builder, point: usize, mode: Mode) {
    let metric = format!("{}scaled_gap_mean", mode.prefix());
    let series: Vec<f64> = b
        .summary
        .iter()
        .filter(|r| r.point == point && r.metric == metric)
        .filter_map(|r| r.empirical)
        .collect();
    if series.len() >= 2 {
        let decreasing = series.windows(2).all(|w| w[1] < w[0]);
        let row = SummaryRow::new(None, point, format!("{metric}_decreasing"))
            .empirical(if decreasing { 1.0 } else { 0.0 }, None, series.len())
            .within(Some(decreasing));
        b.summary.push(row);
    }
}

fn plots(summary: &[SummaryRow]) -> Vec<PlotRow> {
    let mut out = Vec::new();
    for r in summary {
        let Some(n) = r.n else { continue };
        if let Some(e) = r.empirical {
            out.push(PlotRow {
                series: format!("p{}.{}.empirical", r.point, r.metric),
                x: n as f64,
                y: e,
                lo: r.mc_se.map(|s| e - 2.0 * s),
                hi: r.mc_se.map(|s| e + 2.0 * s),
            });
        }
        if let Some(p) = r.predicted {
            out.push(PlotRow {
                series: format!("p{}.{}.predicted", r.point, r.metric),
                x: n as f64,
                y: p,
                lo: None,
                hi: None,
            });
        }
    }
    out
}

/// Kernel constants and bandwidth sequences; no simulation.
pub fn constants_report(ctx: &Context) -> Result<StudyReport> {
    let e = &ctx.cfg.estimator;
    let gamma = ctx.points.iter().find_map(|p| p.gamma).ok_or_else(|| {
        CliError::Config(
            "constants study needs gamma from the scenario, theory or smallball".into(),
        )
    })?;
    let c = funrec::AsymptoticConstants64::power_law(&e.kernel, &e.schedule, gamma, e.ell)?;
    let mut summary = vec![
        SummaryRow::new(None, 0, "M0").predicted(Some(c.m.m0)),
        SummaryRow::new(None, 0, "M1").predicted(Some(c.m.m1)),
        SummaryRow::new(None, 0, "M2").predicted(Some(c.m.m2)),
        SummaryRow::new(None, 0, "alpha").predicted(Some(c.alpha)),
    ];
    for (r, beta) in &c.beta {
        summary.push(SummaryRow::new(None, 0, format!("beta[{r}]")).predicted(Some(*beta)));
    }
    let rs = [1.0 - e.ell, 1.0 - 2.0 * e.ell];
    for &n in &ctx.cfg.n_grid {
        let seq = finite_sequences(&e.schedule, gamma, n, e.ell, &rs)?;
        summary.push(
            SummaryRow::new(Some(n), 0, "A_n")
                .empirical(seq.a_n, None, n as usize)
                .predicted(Some(c.alpha)),
        );
        for (r, b_n) in &seq.b_n {
            summary.push(
                SummaryRow::new(Some(n), 0, format!("B_n[{r}]"))
                    .empirical(*b_n, None, n as usize)
                    .predicted(c.beta_at(*r).ok()),
            );
        }
    }
    let plots = plots(&summary);
    let smallball = ctx
        .points
        .iter()
        .map(|p| match &p.oracle_model {
            Some(m) => m.to_json(),
            None => SmallBallJson {
                kind: "unknown".into(),
                c: None,
                gamma: None,
            },
        })
        .collect();
    Ok(StudyReport {
        study: StudyKind::Constants.name(),
        results: Vec::new(),
        summary,
        plots,
        smallball,
    })
}
