//! Radius sweeps, decay-rate fits and Richardson extrapolation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mass::{compute_report, Estimator, MassReport, ReportOptions};
use crate::metric::MetricSpec;
use crate::quadrature::{build_grid, QuadratureGrid};
use crate::surface::SurfaceFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `v − L ≈ C ρ^{−p}`.
    #[default]
    PowerLaw,
    /// `v − L ≈ C e^{−qρ}`.
    Exponential,
}

impl DecayModel {
    fn abscissa(self, rho: f64) -> f64 {
        match self {
            DecayModel::PowerLaw => rho.ln(),
            DecayModel::Exponential => rho,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub rhos: Vec<f64>,
    pub resolution: usize,
    /// Per-radius resolutions overriding `resolution`.
    pub schedule: Option<Vec<usize>>,
    pub estimators: Vec<Estimator>,
    pub decay: DecayModel,
    pub options: ReportOptions,
}

impl SweepConfig {
    pub fn new(rhos: Vec<f64>, resolution: usize, estimators: Vec<Estimator>, decay: DecayModel) -> Self {
        Self {
            rhos,
            resolution,
            schedule: None,
            estimators,
            decay,
            options: ReportOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rhos.is_empty() {
            return Err(Error::InvalidParameter("empty rho list".into()));
        }
        for w in self.rhos.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "rho values must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let Some(s) = &self.schedule {
            if s.len() != self.rhos.len() {
                return Err(Error::InvalidParameter("resolution schedule length differs from rho list".into()));
            }
        }
        Ok(())
    }

    fn resolution_at(&self, k: usize) -> usize {
        self.schedule.as_ref().map_or(self.resolution, |s| s[k])
    }
}

/// One report per radius, computed in parallel and returned in order. The
/// first failing radius (in sweep order) aborts the sweep.
pub fn run_sweep(spec: &MetricSpec, family: &SurfaceFamily, cfg: &SweepConfig) -> Result<Vec<MassReport>> {
    cfg.validate()?;
    let mut grids: BTreeMap<usize, QuadratureGrid> = BTreeMap::new();
    for k in 0..cfg.rhos.len() {
        let res = cfg.resolution_at(k);
        if let std::collections::btree_map::Entry::Vacant(e) = grids.entry(res) {
            e.insert(build_grid(spec.n, res)?);
        }
    }
    let results: Vec<Result<MassReport>> = cfg
        .rhos
        .par_iter()
        .enumerate()
        .map(|(k, &rho)| {
            let grid = &grids[&cfg.resolution_at(k)];
            compute_report(spec, family, rho, grid, &cfg.estimators, cfg.options).map_err(|e| Error::AtRadius {
                rho,
                source: Box::new(e),
            })
        })
        .collect();
    results.into_iter().collect()
}

/// Fitted decay of one estimator column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub estimator: String,
    pub limit: f64,
    /// Decay exponent, positive when decaying; `+∞` for already-converged
    /// columns.
    pub exponent: f64,
    pub log_prefactor: f64,
    /// Max absolute deviation of `ln|v − L|` from the fitted line.
    pub residual: f64,
    pub window: (f64, f64),
    pub model: DecayModel,
    pub degenerate: bool,
}

const DEGENERATE_REL: f64 = 1e-13;
const GN_MAX_ITER: usize = 50;
const GN_TOL: f64 = 1e-12;

/// Least-squares line `y ≈ c − p t`; returns `(c, p, sum of squares,
/// 1 − R²)`.
fn line_fit(t: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let k = t.len() as f64;
    let tm = t.iter().sum::<f64>() / k;
    let ym = y.iter().sum::<f64>() / k;
    let mut stt = 0.0;
    let mut sty = 0.0;
    for (ti, yi) in t.iter().zip(y) {
        stt += (ti - tm) * (ti - tm);
        sty += (ti - tm) * (yi - ym);
    }
    let slope = sty / stt;
    let c = ym - slope * tm;
    let ss: f64 = t.iter().zip(y).map(|(ti, yi)| (yi - c - slope * ti).powi(2)).sum();
    let syy: f64 = y.iter().map(|yi| (yi - ym).powi(2)).sum();
    (c, -slope, ss, ss / syy)
}

fn log_errors(v: &[f64], limit: f64) -> Option<Vec<f64>> {
    let out: Vec<f64> = v.iter().map(|vi| (vi - limit).abs().ln()).collect();
    if out.iter().all(|x| x.is_finite()) {
        Some(out)
    } else {
        None
    }
}

/// Joint fit of `(limit, prefactor, exponent)` to `(ρ, v)` samples.
///
/// Stage one profiles the limit: for each trial limit beyond the last
/// value, the log-error is fitted by a straight line, and the trial with
/// the smallest unexplained fraction `1 − R²` is kept. Stage two refines all three
/// parameters by Gauss–Newton on the log-error residuals.
pub fn fit_rate(points: &[(f64, f64)], model: DecayModel) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::FitFailure(format!("need at least 4 points, got {}", points.len())));
    }
    for w in points.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::RepeatedAbscissa(w[1].0));
        }
    }
    let t: Vec<f64> = points.iter().map(|p| model.abscissa(p.0)).collect();
    let v: Vec<f64> = points.iter().map(|p| p.1).collect();
    let last = *v.last().unwrap();
    let spread = v.iter().map(|x| (x - last).abs()).fold(0.0, f64::max);
    if !spread.is_finite() {
        return Err(Error::FitFailure("non-finite samples".into()));
    }
    if spread <= DEGENERATE_REL * last.abs().max(1.0) {
        return Err(Error::DegenerateFit { limit: last });
    }
    // direction of approach: the limit lies beyond the last value
    let dir = if last - v[v.len() - 2] >= 0.0 { 1.0 } else { -1.0 };
    let edge = if dir > 0.0 {
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        v.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let profile = |u: f64| -> f64 {
        let limit = edge + dir * spread * u.exp();
        match log_errors(&v, limit) {
            Some(y) => line_fit(&t, &y).3,
            None => f64::INFINITY,
        }
    };
    let (lo, hi, steps) = (-40.0_f64, 12.0_f64, 800);
    let mut best_u = lo;
    let mut best = f64::INFINITY;
    for k in 0..=steps {
        let u = lo + (hi - lo) * k as f64 / steps as f64;
        let f = profile(u);
        if f < best {
            best = f;
            best_u = u;
        }
    }
    // golden-section polish of the profile minimum
    let h = (hi - lo) / steps as f64;
    let (mut a, mut b) = (best_u - h, best_u + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if profile(c) < profile(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let u = 0.5 * (a + b);
    let mut limit = edge + dir * spread * u.exp();
    let y = log_errors(&v, limit).ok_or_else(|| Error::FitFailure("limit inside data range".into()))?;
    let (mut c, mut p, mut ss, _) = line_fit(&t, &y);

    // Gauss–Newton on r_i = ln|v_i − L| − c + p t_i
    for _ in 0..GN_MAX_ITER {
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for i in 0..v.len() {
            let e = v[i] - limit;
            let r = e.abs().ln() - c + p * t[i];
            let jrow = [-1.0 / e, -1.0, t[i]];
            for a in 0..3 {
                jtr[a] += jrow[a] * r;
                for b in 0..3 {
                    jtj[a][b] += jrow[a] * jrow[b];
                }
            }
        }
        let Some(step) = solve3(&jtj, &jtr) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let cand = (limit - lambda * step[0], c - lambda * step[1], p - lambda * step[2]);
            if let Some(yc) = log_errors(&v, cand.0) {
                let ssc: f64 = (0..v.len()).map(|i| (yc[i] - cand.1 + cand.2 * t[i]).powi(2)).sum();
                if ssc <= ss {
                    let moved = (cand.0 - limit).abs() <= GN_TOL * limit.abs().max(spread)
                        && (cand.2 - p).abs() <= GN_TOL * p.abs().max(1.0);
                    limit = cand.0;
                    c = cand.1;
                    p = cand.2;
                    ss = ssc;
                    accepted = !moved;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let y = log_errors(&v, limit).ok_or_else(|| Error::FitFailure("limit inside data range".into()))?;
    let residual = (0..v.len()).map(|i| (y[i] - c + p * t[i]).abs()).fold(0.0, f64::max);
    if !(residual.is_finite() && limit.is_finite() && p.is_finite()) {
        return Err(Error::FitFailure("non-finite fit".into()));
    }
    Ok(RateFit {
        estimator: String::new(),
        limit,
        exponent: p,
        log_prefactor: c,
        residual,
        window: (points[0].0, points[points.len() - 1].0),
        model,
        degenerate: false,
    })
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for k in col..4 {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Fit that never fails on converged columns: `DegenerateFit` becomes a
/// `RateFit` with the last value as limit and an infinite exponent.
pub fn fit_or_degenerate(name: &str, points: &[(f64, f64)], model: DecayModel) -> Result<RateFit> {
    match fit_rate(points, model) {
        Ok(mut f) => {
            f.estimator = name.to_string();
            Ok(f)
        }
        Err(Error::DegenerateFit { limit }) => Ok(RateFit {
            estimator: name.to_string(),
            limit,
            exponent: f64::INFINITY,
            log_prefactor: f64::NEG_INFINITY,
            residual: 0.0,
            window: (points[0].0, points[points.len() - 1].0),
            model,
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

/// `(ρ, value)` pairs of one report column.
pub fn column(reports: &[MassReport], name: &str) -> Vec<(f64, f64)> {
    reports
        .iter()
        .filter_map(|r| r.get(name).map(|v| (r.rho, v)))
        .collect()
}

/// Cascaded Richardson elimination of `ρ^{−p}, ρ^{−p−1}, …` (power law) or
/// `e^{−qρ}, e^{−(q+1)ρ}, …` (exponential).
pub fn richardson_with(points: &[(f64, f64)], p: f64, model: DecayModel) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::BadExponent(p));
    }
    if points.len() < 2 {
        return Err(Error::FitFailure(format!("need at least 2 points, got {}", points.len())));
    }
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|b| b.0 == a.0) {
            return Err(Error::RepeatedAbscissa(a.0));
        }
    }
    let mut level: Vec<(f64, f64)> = points.to_vec();
    let mut q = p;
    while level.len() > 1 {
        level = level
            .windows(2)
            .map(|w| {
                let ((r1, v1), (r2, v2)) = (w[0], w[1]);
                // weights ρ^q (or e^{qρ}) relative to the first point
                let ratio = match model {
                    DecayModel::PowerLaw => (r2 / r1).powf(q),
                    DecayModel::Exponential => (q * (r2 - r1)).exp(),
                };
                (r2, (ratio * v2 - v1) / (ratio - 1.0))
            })
            .collect();
        q += 1.0;
    }
    Ok(level[0].1)
}

/// Power-law Richardson extrapolation with leading exponent `p`.
pub fn richardson(points: &[(f64, f64)], p: f64) -> Result<f64> {
    richardson_with(points, p, DecayModel::PowerLaw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn samples(rhos: &[f64], f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        rhos.iter().map(|&r| (r, f(r))).collect()
    }

    #[test]
    fn power_law_synthetic() {
        let pts = samples(&[10.0, 20.0, 40.0, 80.0, 160.0], |r| 1.0 + 5.0 * r.powi(-2));
        let fit = fit_rate(&pts, DecayModel::PowerLaw).unwrap();
        assert!((fit.limit - 1.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.exponent - 2.0).abs() < 0.05, "{fit:?}");
        assert!(fit.residual < 1e-6);
    }

    #[test]
    fn exponential_synthetic() {
        let pts = samples(&[2.0, 3.0, 4.0, 5.0, 6.0, 7.0], |r| 3.0 + 2.0 * (-1.5 * r).exp());
        let fit = fit_rate(&pts, DecayModel::Exponential).unwrap();
        assert!((fit.limit - 3.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.exponent - 1.5).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn approach_from_above_and_below() {
        let pts = samples(&[10.0, 20.0, 40.0, 80.0], |r| 2.0 - 3.0 / r);
        let fit = fit_rate(&pts, DecayModel::PowerLaw).unwrap();
        assert!((fit.limit - 2.0).abs() < 1e-8 && (fit.exponent - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constant_is_degenerate() {
        let pts = samples(&[1.0, 2.0, 3.0, 4.0], |_| 7.0);
        assert!(matches!(fit_rate(&pts, DecayModel::PowerLaw), Err(Error::DegenerateFit { limit }) if limit == 7.0));
        let f = fit_or_degenerate("x", &pts, DecayModel::PowerLaw).unwrap();
        assert!(f.degenerate && f.exponent.is_infinite());
    }

    #[test]
    fn too_few_points() {
        let pts = samples(&[1.0, 2.0, 3.0], |r| 1.0 / r);
        assert!(matches!(fit_rate(&pts, DecayModel::PowerLaw), Err(Error::FitFailure(_))));
    }

    #[test]
    fn richardson_exact_on_model() {
        let pts = samples(&[100.0, 200.0], |r| 1.0 + 1.0 / r);
        assert!((richardson(&pts, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let pts = samples(&[50.0, 100.0, 200.0, 400.0], |r| 1.0 + 1.0 / r + 0.5 / (r * r) + 0.25 / r.powi(3));
        assert!((richardson(&pts, 1.0).unwrap() - 1.0).abs() < 1e-13);
        let pts = samples(&[4.0, 5.0, 6.0], |r| 2.0 + (-3.0 * r).exp() + (-4.0 * r).exp());
        assert!((richardson_with(&pts, 3.0, DecayModel::Exponential).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn richardson_guards() {
        let pts = [(100.0, 1.0), (100.0, 1.1)];
        assert!(matches!(richardson(&pts, 1.0), Err(Error::RepeatedAbscissa(_))));
        assert!(matches!(richardson(&[(1.0, 1.0), (2.0, 1.0)], 0.0), Err(Error::BadExponent(_))));
    }

    #[test]
    fn sweep_rejects_unordered_rho() {
        let cfg = SweepConfig::new(vec![5.0, 4.0], 8, vec![Estimator::AdmFlux], DecayModel::PowerLaw);
        let r = run_sweep(&MetricSpec::euclidean(3), &SurfaceFamily::coordinate_sphere(), &cfg);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sweep_failure_names_radius() {
        let cfg = SweepConfig::new(vec![0.2, 5.0], 8, vec![Estimator::HawkingAf], DecayModel::PowerLaw);
        let r = run_sweep(&MetricSpec::schwarzschild(3, 1.0), &SurfaceFamily::coordinate_sphere(), &cfg);
        assert!(matches!(r, Err(Error::AtRadius { rho, .. }) if rho == 0.2));
    }

    proptest! {
        #[test]
        fn fit_is_scale_equivariant(
            limit in -5.0f64..5.0,
            amp in 0.5f64..20.0,
            p in 0.8f64..3.0,
            s in 0.01f64..100.0,
        ) {
            let pts = samples(&[10.0, 20.0, 40.0, 80.0, 160.0], |r| limit + amp * r.powf(-p));
            let scaled: Vec<(f64, f64)> = pts.iter().map(|&(r, v)| (r, s * v)).collect();
            let a = fit_rate(&pts, DecayModel::PowerLaw).unwrap();
            let b = fit_rate(&scaled, DecayModel::PowerLaw).unwrap();
            prop_assert!((a.exponent - b.exponent).abs() < 1e-6 * a.exponent.abs().max(1.0));
            prop_assert!((b.limit - s * a.limit).abs() < 1e-6 * (s * amp).max(1.0));
        }
    }
}
