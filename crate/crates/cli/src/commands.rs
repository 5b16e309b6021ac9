//! The four subcommands. Computation may run in parallel; every file is
//! written single-threaded once the numbers are in.

use std::f64::consts::PI;

use serde::Serialize;

use quasimass::analysis::{column, fit_or_degenerate, richardson_with, run_sweep, DecayModel, RateFit};
use quasimass::mass::{compute_report, resolve_precision, Estimator, MassReport, ReportOptions, ESTIMATOR_NAMES};
use quasimass::metric::{fd_check_jet, CATALOG};
use quasimass::quadrature::build_grid;
use quasimass::surface::{discretize, nearly_round_diagnostics, FamilyKind, NearlyRoundReport, SurfaceFamily};
use quasimass::{Chart, Dd, MetricSpec, Precision, Real};

use crate::config::{Format, LimitMethod, Run};
use crate::failure::{CliResult, Failure};
use crate::output::{convergence_svg, fmt_num, json_bytes, reports_csv, write_file, Curve};

const FD_TOL: f64 = 1e-6;
const FD_TOL_ADS: f64 = 1e-5;
const GAUSS_TOL: f64 = 1e-8;
const GAUSS_BONNET_TOL: f64 = 1e-8;
const DOUBLING_TOL: f64 = 1e-9;
const DOUBLING_MIN_RES: usize = 32;

fn metric_params(name: &str) -> &'static str {
    match name {
        "euclidean" | "hyperbolic_ball" => "-",
        "schwarzschild_isotropic" | "ads_schwarzschild" => "m",
        "af_perturbed" => "m, a, tau",
        "ah_perturbed" => "tau, a",
        _ => "?",
    }
}

fn metric_chart(name: &str) -> Chart {
    match name {
        "euclidean" | "schwarzschild_isotropic" | "af_perturbed" => Chart::CartesianAF,
        _ => Chart::BallAH,
    }
}

pub fn list() -> String {
    let mut out = String::from("metrics (name, chart, params):\n");
    for name in CATALOG {
        out += &format!("  {name:<24} {:<12} {}\n", metric_chart(name).label(), metric_params(name));
    }
    out += "families (kind, chart):\n";
    for (kind, chart) in [
        (FamilyKind::CoordinateSphere, Chart::CartesianAF),
        (FamilyKind::PerturbedSphere, Chart::CartesianAF),
        (FamilyKind::GeodesicSphere, Chart::BallAH),
    ] {
        out += &format!("  {:<24} {}\n", kind.label(), chart.label());
    }
    out += "estimators (name, chart, notes):\n";
    for name in ESTIMATOR_NAMES {
        let e = Estimator::parse(name, 3).expect("catalog name parses")[0];
        let mut notes = Vec::new();
        if e.index().is_some() {
            notes.push("indexed [0..=n]");
        }
        if e == Estimator::ByVectorAh {
            notes.push("n+1 components");
        }
        if e.needs_embedding() {
            notes.push("round family only");
        }
        out += &format!("  {name:<24} {:<12} {}\n", e.chart().label(), notes.join(", "));
    }
    out
}

#[derive(Serialize)]
struct ComputeOutput<'a> {
    metric: &'a MetricSpec,
    family: &'a SurfaceFamily,
    report: &'a MassReport,
}

fn summary_line(r: &MassReport) -> Vec<String> {
    r.entries
        .iter()
        .map(|e| match (e.value, &e.skipped) {
            (Some(v), _) => format!("rho = {}  {} = {}", r.rho, e.name, fmt_num(v)),
            (None, Some(why)) => format!("rho = {}  {} skipped: {why}", r.rho, e.name),
            (None, None) => format!("rho = {}  {} skipped", r.rho, e.name),
        })
        .collect()
}

pub fn compute(run: &Run) -> CliResult<Vec<String>> {
    if run.rhos.len() != 1 {
        return Err(Failure::Config(format!("compute takes exactly one rho, got {}", run.rhos.len())));
    }
    let rho = run.rhos[0];
    let res = run.schedule.as_ref().map_or(run.resolution, |s| s[0]);
    let grid = build_grid(run.spec.n, res).map_err(|e| Failure::from_core("", &e))?;
    let report = compute_report(&run.spec, &run.family, rho, &grid, &run.estimators, run.options)
        .map_err(|e| Failure::from_core(&format!("at rho = {rho}"), &e))?;
    if run.wants(Format::Json) {
        let out = ComputeOutput {
            metric: &run.spec,
            family: &run.family,
            report: &report,
        };
        write_file(&run.out_dir, "report.json", &json_bytes(&out)?)?;
    }
    if run.wants(Format::Csv) {
        write_file(&run.out_dir, "report.csv", &reports_csv(std::slice::from_ref(&report), &run.columns())?)?;
    }
    Ok(summary_line(&report))
}

/// A rates.json row.
#[derive(Debug, Serialize)]
pub struct RateRow {
    pub estimator: String,
    pub limit: Option<f64>,
    /// `null` for converged (degenerate) columns.
    pub exponent: Option<f64>,
    pub residual: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RateRow {
    fn from_fit(f: &RateFit) -> Self {
        RateRow {
            estimator: f.estimator.clone(),
            limit: Some(f.limit),
            exponent: f.exponent.is_finite().then_some(f.exponent),
            residual: Some(f.residual),
            window: Some(f.window),
            degenerate: f.degenerate,
            error: None,
        }
    }

    fn failed(name: &str, why: String) -> Self {
        RateRow {
            estimator: name.to_string(),
            limit: None,
            exponent: None,
            residual: None,
            window: None,
            degenerate: false,
            error: Some(why),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExpectResult {
    pub estimator: String,
    pub method: &'static str,
    pub extrapolated: f64,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
}

fn default_exponent(n: usize, decay: DecayModel) -> f64 {
    match decay {
        DecayModel::PowerLaw => n as f64 - 2.0,
        DecayModel::Exponential => n as f64,
    }
}

pub fn sweep(run: &Run) -> CliResult<Vec<String>> {
    if run.rhos.len() < 4 {
        return Err(Failure::Config(format!("sweep needs at least 4 rho values, got {}", run.rhos.len())));
    }
    let reports = run_sweep(&run.spec, &run.family, &run.sweep_config()).map_err(|e| Failure::from_core("sweep", &e))?;
    let columns = run.columns();
    let mut rates = Vec::new();
    let mut fits = Vec::new();
    for c in &columns {
        let pts = column(&reports, c);
        let row = if pts.len() < reports.len() {
            RateRow::failed(c, "skipped at some radii".into())
        } else {
            match fit_or_degenerate(c, &pts, run.decay) {
                Ok(f) => {
                    fits.push((c.clone(), f.clone()));
                    RateRow::from_fit(&f)
                }
                Err(e) => RateRow::failed(c, e.to_string()),
            }
        };
        rates.push(row);
    }

    let mut expect_results = Vec::new();
    let mut lines = Vec::new();
    for ex in &run.expect {
        let pts = column(&reports, &ex.estimator);
        let (method, value) = match ex.method {
            LimitMethod::Richardson => {
                let p = ex.exponent.unwrap_or_else(|| default_exponent(run.spec.n, run.decay));
                let v = richardson_with(&pts, p, run.decay)
                    .map_err(|e| Failure::from_core(&format!("richardson on {}", ex.estimator), &e))?;
                ("richardson", v)
            }
            LimitMethod::Fit => {
                let f = fits
                    .iter()
                    .find(|(c, _)| *c == ex.estimator)
                    .ok_or_else(|| Failure::Numerical(format!("no rate fit available for {}", ex.estimator)))?;
                ("fit", f.1.limit)
            }
        };
        let pass = (value - ex.limit).abs() <= ex.tol;
        lines.push(format!(
            "expect {} ({method}): {} vs {} ± {:e}: {}",
            ex.estimator,
            fmt_num(value),
            ex.limit,
            ex.tol,
            if pass { "ok" } else { "VIOLATED" }
        ));
        expect_results.push(ExpectResult {
            estimator: ex.estimator.clone(),
            method,
            extrapolated: value,
            expected: ex.limit,
            tol: ex.tol,
            pass,
        });
    }

    if run.wants(Format::Csv) {
        write_file(&run.out_dir, "sweep.csv", &reports_csv(&reports, &columns)?)?;
    }
    if run.wants(Format::Json) {
        write_file(&run.out_dir, "rates.json", &json_bytes(&rates)?)?;
        write_file(&run.out_dir, "reports.json", &json_bytes(&reports)?)?;
        if !expect_results.is_empty() {
            write_file(&run.out_dir, "expect.json", &json_bytes(&expect_results)?)?;
        }
    }
    if run.wants(Format::Svg) {
        let curves: Vec<Curve> = fits
            .iter()
            .filter(|(_, f)| !f.degenerate)
            .map(|(c, f)| Curve {
                label: c.clone(),
                points: column(&reports, c).into_iter().map(|(r, v)| (r, (v - f.limit).abs())).collect(),
            })
            .collect();
        let title = format!("{} (n = {}), {}", run.spec.name, run.spec.n, run.family.kind.label());
        write_file(&run.out_dir, "convergence.svg", convergence_svg(&curves, run.chart, &title).as_bytes())?;
    }

    for r in &rates {
        lines.push(match (&r.error, r.limit) {
            (Some(e), _) => format!("{}: no fit ({e})", r.estimator),
            (None, Some(l)) => match r.exponent {
                Some(p) => format!("{}: limit {} exponent {:.4}", r.estimator, fmt_num(l), p),
                None => format!("{}: converged at {}", r.estimator, fmt_num(l)),
            },
            _ => String::new(),
        });
    }
    let violated: Vec<&str> = expect_results.iter().filter(|e| !e.pass).map(|e| e.estimator.as_str()).collect();
    if !violated.is_empty() {
        for l in &lines {
            eprintln!("{l}");
        }
        return Err(Failure::Tolerance(format!("expectation violated for {}", violated.join(", "))));
    }
    Ok(lines)
}

#[derive(Debug, Serialize)]
pub struct CheckItem {
    pub check: &'static str,
    pub rho: Option<f64>,
    pub detail: String,
    pub value: f64,
    /// `null` when the check is reported but not enforced.
    pub tol: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
struct CheckOutput<'a> {
    metric: &'a MetricSpec,
    family: &'a SurfaceFamily,
    resolution: usize,
    checks: Vec<CheckItem>,
    nearly_round: Vec<(f64, NearlyRoundReport)>,
    pass: bool,
}

impl CheckItem {
    fn new(check: &'static str, rho: Option<f64>, detail: String, value: f64, tol: Option<f64>) -> Self {
        let pass = value.is_finite() && tol.is_none_or(|t| value <= t);
        CheckItem {
            check,
            rho,
            detail,
            value,
            tol,
            pass,
        }
    }
}

/// Deterministic, roughly uniform unit directions (golden-angle spiral on
/// `S²`, padded with a fixed pattern in higher dimensions).
fn probe_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let s = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            let mut v = vec![s * phi.cos(), s * phi.sin(), z];
            for j in 3..n {
                v.push(0.3 * ((j + k) as f64).sin());
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

fn surface_checks<T: Real>(run: &Run, rho: f64, res: usize, items: &mut Vec<CheckItem>) -> CliResult<NearlyRoundReport> {
    let n = run.spec.n;
    let ctx = format!("at rho = {rho}");
    let grid = build_grid(n, res).map_err(|e| Failure::from_core("", &e))?;
    let data = discretize::<T>(&run.spec, &run.family, rho, &grid).map_err(|e| Failure::from_core(&ctx, &e))?;
    items.push(CheckItem::new(
        "gauss_equation",
        Some(rho),
        "max node residual".into(),
        data.max_gauss_residual(),
        Some(GAUSS_TOL),
    ));
    if n == 3 {
        let total = data.integrate(|nd| nd.srho).map_err(|e| Failure::from_core(&ctx, &e))?;
        let rel = (total.to_f64() / (8.0 * PI) - 1.0).abs();
        items.push(CheckItem::new(
            "gauss_bonnet",
            Some(rho),
            "relative deviation of ∫ S dσ from 8π".into(),
            rel,
            Some(GAUSS_BONNET_TOL),
        ));
    }
    let tau = run.spec.tau().map_err(|e| Failure::from_core("", &e))?;
    Ok(nearly_round_diagnostics(&data, tau))
}

pub fn check(run: &Run) -> CliResult<Vec<String>> {
    let n = run.spec.n;
    let mut items = Vec::new();
    let fd_tol = if run.spec.name == "ads_schwarzschild" { FD_TOL_ADS } else { FD_TOL };
    for &rho in &run.rhos {
        let (radius, h) = match run.chart {
            Chart::CartesianAF => (rho, 1e-3 * rho),
            Chart::BallAH => {
                let x = (rho / 2.0).tanh();
                (x, 1e-3 * (1.0 - x))
            }
        };
        let mut worst: (f64, f64) = (0.0, 0.0);
        for dir in probe_directions(n, 8) {
            let p: Vec<f64> = dir.iter().map(|d| d * radius).collect();
            let (e1, e2) = fd_check_jet(&run.spec, &p, h).map_err(|e| Failure::from_core(&format!("fd check at rho = {rho}"), &e))?;
            worst = (worst.0.max(e1), worst.1.max(e2));
        }
        items.push(CheckItem::new("fd_jet_first", Some(rho), "∂g vs 4th-order stencil".into(), worst.0, Some(fd_tol)));
        items.push(CheckItem::new("fd_jet_second", Some(rho), "∂∂g vs 4th-order stencil".into(), worst.1, Some(fd_tol)));
    }

    let mut nearly_round = Vec::new();
    let precision = resolve_precision(run.options.precision, run.chart);
    for (k, &rho) in run.rhos.iter().enumerate() {
        let res = run.schedule.as_ref().map_or(run.resolution, |s| s[k]);
        let d = match precision {
            Precision::DoubleDouble => surface_checks::<Dd>(run, rho, res, &mut items)?,
            _ => surface_checks::<f64>(run, rho, res, &mut items)?,
        };
        nearly_round.push((rho, d));
    }

    let opts = ReportOptions {
        skip_not_round: true,
        ..run.options
    };
    for (k, &rho) in run.rhos.iter().enumerate() {
        let res = run.schedule.as_ref().map_or(run.resolution, |s| s[k]);
        let ctx = format!("grid doubling at rho = {rho}");
        let coarse_grid = build_grid(n, res).map_err(|e| Failure::from_core("", &e))?;
        let fine_grid = build_grid(n, 2 * res).map_err(|e| Failure::from_core("", &e))?;
        let coarse = compute_report(&run.spec, &run.family, rho, &coarse_grid, &run.estimators, opts)
            .map_err(|e| Failure::from_core(&ctx, &e))?;
        let fine = compute_report(&run.spec, &run.family, rho, &fine_grid, &run.estimators, opts)
            .map_err(|e| Failure::from_core(&ctx, &e))?;
        let tol = (res >= DOUBLING_MIN_RES).then_some(DOUBLING_TOL);
        for e in &coarse.entries {
            if let (Some(a), Some(b)) = (e.value, fine.get(&e.name)) {
                let change = (a - b).abs() / a.abs().max(1.0);
                items.push(CheckItem::new(
                    "grid_doubling",
                    Some(rho),
                    format!("{} at {res} vs {}", e.name, 2 * res),
                    change,
                    tol,
                ));
            }
        }
    }

    let pass = items.iter().all(|i| i.pass);
    let out = CheckOutput {
        metric: &run.spec,
        family: &run.family,
        resolution: run.resolution,
        checks: items,
        nearly_round,
        pass,
    };
    write_file(&run.out_dir, "check.json", &json_bytes(&out)?)?;
    let failed: Vec<String> = out
        .checks
        .iter()
        .filter(|i| !i.pass)
        .map(|i| format!("{} at rho = {} ({}): {:e}", i.check, i.rho.unwrap_or(f64::NAN), i.detail, i.value))
        .collect();
    if !failed.is_empty() {
        return Err(Failure::Tolerance(failed.join("; ")));
    }
    Ok(vec![format!("{} checks passed", out.checks.len())])
}
