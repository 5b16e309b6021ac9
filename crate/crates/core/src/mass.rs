//! Mass estimators: the ADM flux, the Ricci-form masses, the
//! Chruściel–Herzlich functional and the Hawking-, Brown–York- and
//! σ₂-type quasi-local integrals, plus the per-radius [`MassReport`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{christoffel, constants};
use crate::embed::{round_embed, RoundEmbedding, Target};
use crate::error::{Error, Result};
use crate::linalg::inverse_spd;
use crate::metric::{eval_background_jet, eval_jet, zero_mat, zero_vec, Chart, MetricSpec, Vector};
use crate::quadrature::QuadratureGrid;
use crate::real::{Dd, Precision, Real};
use crate::sum::KahanSum;
use crate::surface::{discretize, unit_vector_t, SurfaceData, SurfaceFamily, SurfaceNode};

/// Conformal Killing fields of the model: `X⁽⁰⁾ = x^k ∂_k`, `X⁽ʲ⁾ = ∂_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KillingField {
    pub index: usize,
}

impl KillingField {
    pub fn eval<T: Real>(&self, n: usize, x: &Vector<T>) -> Vector<T> {
        let mut out = zero_vec::<T>();
        if self.index == 0 {
            out[..n].copy_from_slice(&x[..n]);
        } else {
            out[self.index - 1] = T::one();
        }
        out
    }
}

/// Static potentials of the ball model: `V⁽⁰⁾ = (1 + r²)/(1 − r²)`,
/// `V⁽ⁱ⁾ = 2xⁱ/(1 − r²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VFunction {
    pub index: usize,
}

impl VFunction {
    pub fn value<T: Real>(&self, n: usize, x: &Vector<T>) -> T {
        let r2 = (0..n).fold(T::zero(), |acc, k| acc + x[k] * x[k]);
        let w = T::one() - r2;
        if self.index == 0 {
            (T::one() + r2) / w
        } else {
            T::lit(2.0) * x[self.index - 1] / w
        }
    }

    pub fn gradient<T: Real>(&self, n: usize, x: &Vector<T>) -> Vector<T> {
        let r2 = (0..n).fold(T::zero(), |acc, k| acc + x[k] * x[k]);
        let w = T::one() - r2;
        let four_w2 = T::lit(4.0) / (w * w);
        let mut out = zero_vec::<T>();
        for k in 0..n {
            out[k] = if self.index == 0 {
                four_w2 * x[k]
            } else {
                let i = self.index - 1;
                let diag = if i == k { T::lit(2.0) / w } else { T::zero() };
                diag + four_w2 * x[i] * x[k]
            };
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    AdmFlux,
    RicciAf,
    HawkingAf,
    ByAf,
    Sigma2Af,
    ChMass(usize),
    RicciAh(usize),
    HawkingAh(usize),
    ByAh(usize),
    ByVectorAh,
}

pub const ESTIMATOR_NAMES: [&str; 10] = [
    "adm_flux",
    "ricci_af",
    "hawking_af",
    "by_af",
    "sigma2_af",
    "ch_mass",
    "ricci_ah",
    "hawking_ah",
    "by_ah",
    "by_vector_ah",
];

impl Estimator {
    pub fn base_name(&self) -> &'static str {
        match self {
            Estimator::AdmFlux => "adm_flux",
            Estimator::RicciAf => "ricci_af",
            Estimator::HawkingAf => "hawking_af",
            Estimator::ByAf => "by_af",
            Estimator::Sigma2Af => "sigma2_af",
            Estimator::ChMass(_) => "ch_mass",
            Estimator::RicciAh(_) => "ricci_ah",
            Estimator::HawkingAh(_) => "hawking_ah",
            Estimator::ByAh(_) => "by_ah",
            Estimator::ByVectorAh => "by_vector_ah",
        }
    }

    pub fn index(&self) -> Option<usize> {
        match *self {
            Estimator::ChMass(i) | Estimator::RicciAh(i) | Estimator::HawkingAh(i) | Estimator::ByAh(i) => Some(i),
            _ => None,
        }
    }

    /// Output column names (one per component).
    pub fn columns(&self, n: usize) -> Vec<String> {
        match self {
            Estimator::ByVectorAh => (0..=n).map(|k| format!("by_vector_ah[{k}]")).collect(),
            e => match e.index() {
                Some(i) => vec![format!("{}[{i}]", e.base_name())],
                None => vec![e.base_name().to_string()],
            },
        }
    }

    pub fn chart(&self) -> Chart {
        match self {
            Estimator::AdmFlux | Estimator::RicciAf | Estimator::HawkingAf | Estimator::ByAf | Estimator::Sigma2Af => {
                Chart::CartesianAF
            }
            _ => Chart::BallAH,
        }
    }

    /// Whether the estimator integrates over the discretized family.
    pub fn needs_surface(&self) -> bool {
        !matches!(self, Estimator::AdmFlux | Estimator::ChMass(_))
    }

    pub fn needs_embedding(&self) -> bool {
        matches!(
            self,
            Estimator::ByAf | Estimator::Sigma2Af | Estimator::ByAh(_) | Estimator::ByVectorAh
        )
    }

    /// Parses `name` or `name[i]`. An indexed estimator given without an
    /// index expands to all of `0..=n`.
    pub fn parse(s: &str, n: usize) -> Result<Vec<Estimator>> {
        let s = s.trim();
        let (base, idx) = match s.find('[') {
            Some(p) if s.ends_with(']') => {
                let i: usize = s[p + 1..s.len() - 1]
                    .trim()
                    .parse()
                    .map_err(|_| Error::UnknownEstimator(s.to_string()))?;
                (&s[..p], Some(i))
            }
            Some(_) => return Err(Error::UnknownEstimator(s.to_string())),
            None => (s, None),
        };
        let indexed = |f: fn(usize) -> Estimator| -> Result<Vec<Estimator>> {
            match idx {
                Some(i) if i <= n => Ok(vec![f(i)]),
                Some(_) => Err(Error::UnknownEstimator(s.to_string())),
                None => Ok((0..=n).map(f).collect()),
            }
        };
        let plain = |e: Estimator| -> Result<Vec<Estimator>> {
            if idx.is_some() {
                Err(Error::UnknownEstimator(s.to_string()))
            } else {
                Ok(vec![e])
            }
        };
        match base {
            "adm_flux" => plain(Estimator::AdmFlux),
            "ricci_af" => plain(Estimator::RicciAf),
            "hawking_af" => plain(Estimator::HawkingAf),
            "by_af" => plain(Estimator::ByAf),
            "sigma2_af" => plain(Estimator::Sigma2Af),
            "by_vector_ah" => plain(Estimator::ByVectorAh),
            "ch_mass" => indexed(Estimator::ChMass),
            "ricci_ah" => indexed(Estimator::RicciAh),
            "hawking_ah" => indexed(Estimator::HawkingAh),
            "by_ah" => indexed(Estimator::ByAh),
            _ => Err(Error::UnknownEstimator(s.to_string())),
        }
    }

    /// Every estimator applicable to a chart, in column order.
    pub fn all_for(chart: Chart, n: usize) -> Vec<Estimator> {
        match chart {
            Chart::CartesianAF => vec![
                Estimator::AdmFlux,
                Estimator::RicciAf,
                Estimator::HawkingAf,
                Estimator::ByAf,
                Estimator::Sigma2Af,
            ],
            Chart::BallAH => {
                let mut v = Vec::new();
                for f in [Estimator::ChMass, Estimator::RicciAh, Estimator::HawkingAh, Estimator::ByAh] {
                    v.extend((0..=n).map(f));
                }
                v.push(Estimator::ByVectorAh);
                v
            }
        }
    }
}

fn require_chart(estimator: &str, chart: Chart, required: Chart) -> Result<()> {
    if chart == required {
        Ok(())
    } else {
        Err(Error::WrongChart {
            estimator: estimator.to_string(),
            required: required.label(),
        })
    }
}

fn require_target<T: Real>(estimator: &str, emb: &RoundEmbedding<T>, target: Target) -> Result<()> {
    if emb.target == target {
        Ok(())
    } else {
        Err(Error::WrongChart {
            estimator: estimator.to_string(),
            required: match target {
                Target::Euclidean => Chart::CartesianAF.label(),
                Target::Hyperbolic => Chart::BallAH.label(),
            },
        })
    }
}

/// Compensated, order-fixed sum of per-node contributions computed in
/// parallel.
fn node_sum<T: Real, F>(grid: &QuadratureGrid, f: F) -> Result<T>
where
    F: Fn(usize) -> Result<T> + Sync,
{
    let parts: Vec<T> = (0..grid.len()).into_par_iter().map(&f).collect::<Result<Vec<_>>>()?;
    let mut acc = KahanSum::new();
    for (i, p) in parts.into_iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: i });
        }
        acc.add(p);
    }
    Ok(acc.total())
}

/// `b_n ∫_{S_ρ} (∂_i g_ij − ∂_j g_ii) ν_e^j dσ_e` on the coordinate sphere.
pub fn adm_flux<T: Real>(spec: &MetricSpec, rho: f64, grid: &QuadratureGrid) -> Result<T> {
    require_chart("adm_flux", spec.chart()?, Chart::CartesianAF)?;
    let n = spec.n;
    let k = constants(n)?;
    let rho_t = T::lit(rho);
    let area = rho_t.powi(n as i32 - 1);
    let total = node_sum(grid, |idx| {
        let q = &grid.nodes[idx];
        let theta = unit_vector_t::<T>(n, q);
        let x: Vec<T> = (0..n).map(|i| rho_t * theta[i]).collect();
        let jet = eval_jet::<T>(spec, &x)?;
        let mut s = T::zero();
        for j in 0..n {
            let mut c = T::zero();
            for i in 0..n {
                c += jet.dg[i][i][j] - jet.dg[j][i][i];
            }
            s += c * theta[j];
        }
        Ok(s * area * T::lit(q.weight))
    })?;
    Ok(T::lit(k.b) * total)
}

/// `−c_n ∫ G₀(X, ν) dσ` with `X = x^i ∂_i`.
pub fn ricci_af<T: Real>(data: &SurfaceData<T>) -> Result<T> {
    require_chart("ricci_af", data.chart, Chart::CartesianAF)?;
    ricci_form(data, 0)
}

fn ricci_form<T: Real>(data: &SurfaceData<T>, index: usize) -> Result<T> {
    let n = data.n;
    let c = constants(n)?.c;
    let field = KillingField { index };
    let total = data.integrate(|nd| {
        let x = field.eval(n, &nd.x);
        crate::surface::contract(n, &nd.g_lambda, &x, &nd.nu)
    })?;
    Ok(-T::lit(c) * total)
}

/// `S^ρ − (n−2)/(n−1) H²`, plus `(n−1)(n−2)` in the hyperbolic case.
fn hawking_integrand<T: Real>(n: usize, nd: &SurfaceNode<T>, hyperbolic: bool) -> T {
    let nf = n as f64;
    let mut v = nd.srho - T::lit(nf - 2.0) * nd.h * nd.h / T::lit(nf - 1.0);
    if hyperbolic {
        v += T::lit((nf - 1.0) * (nf - 2.0));
    }
    v
}

/// `(c_n/2) r_a ∫ (S^ρ − (n−2)/(n−1) H²) dσ`, `r_a` the area radius.
pub fn hawking_af<T: Real>(data: &SurfaceData<T>) -> Result<T> {
    require_chart("hawking_af", data.chart, Chart::CartesianAF)?;
    let n = data.n;
    let c = constants(n)?.c;
    let total = data.integrate(|nd| hawking_integrand(n, nd, false))?;
    Ok(T::lit(c / 2.0) * data.area_radius * total)
}

/// `2 b_n ∫ (H₀ − H) dσ`.
pub fn by_af<T: Real>(data: &SurfaceData<T>, emb: &RoundEmbedding<T>) -> Result<T> {
    require_chart("by_af", data.chart, Chart::CartesianAF)?;
    require_target("by_af", emb, Target::Euclidean)?;
    let b = constants(data.n)?.b;
    let total = data.integrate(|nd| emb.h0 - nd.h)?;
    Ok(T::lit(2.0 * b) * total)
}

/// `c_n r_a ∫ (σ₂(κ⁰) − σ₂(κ)) dσ`.
pub fn sigma2_af<T: Real>(data: &SurfaceData<T>, emb: &RoundEmbedding<T>) -> Result<T> {
    require_chart("sigma2_af", data.chart, Chart::CartesianAF)?;
    require_target("sigma2_af", emb, Target::Euclidean)?;
    let n = data.n;
    let c = constants(n)?.c;
    let s0 = emb.sigma2_0(n);
    let total = data.integrate(|nd| s0 - nd.sigma2())?;
    Ok(T::lit(c) * data.area_radius * total)
}

/// Chruściel–Herzlich functional `M(V⁽ⁱ⁾)` on the background geodesic
/// sphere of radius `ρ`: `b_n ∫ [V(div₀h − d tr₀h) − h(∇₀V, ·) + tr₀h dV](ν̃) dσ₀`
/// with `h = g − g₀`.
pub fn ch_mass<T: Real>(spec: &MetricSpec, index: usize, rho: f64, grid: &QuadratureGrid) -> Result<T> {
    require_chart("ch_mass", spec.chart()?, Chart::BallAH)?;
    let n = spec.n;
    if index > n {
        return Err(Error::UnknownEstimator(format!("ch_mass[{index}]")));
    }
    let b = constants(n)?.b;
    let big_r = (T::lit(rho) / T::lit(2.0)).tanh();
    let w = T::one() - big_r * big_r;
    let sinh_rho = T::lit(2.0) * big_r / w;
    let area = sinh_rho.powi(n as i32 - 1);
    let v = VFunction { index };
    let total = node_sum(grid, |idx| {
        let q = &grid.nodes[idx];
        let theta = unit_vector_t::<T>(n, q);
        let mut x = zero_vec::<T>();
        for k in 0..n {
            x[k] = big_r * theta[k];
        }
        let jet = eval_jet::<T>(spec, &x[..n])?;
        let bg = eval_background_jet::<T>(spec, &x[..n])?;
        let g0inv = inverse_spd(n, &bg.g)?;
        let gamma0 = christoffel(&bg)?;
        let mut h = zero_mat::<T>();
        for i in 0..n {
            for j in 0..n {
                h[i][j] = jet.g[i][j] - bg.g[i][j];
            }
        }
        let dh = |k: usize, i: usize, j: usize| jet.dg[k][i][j] - bg.dg[k][i][j];
        let mut tr = T::zero();
        for i in 0..n {
            for j in 0..n {
                tr += g0inv[i][j] * h[i][j];
            }
        }
        let vv = v.value(n, &x);
        let dv = v.gradient(n, &x);
        let mut grad_v = zero_vec::<T>();
        for a in 0..n {
            grad_v[a] = (0..n).fold(T::zero(), |acc, c| acc + g0inv[a][c] * dv[c]);
        }
        let half_w = w / T::lit(2.0);
        let mut s = T::zero();
        for k in 0..n {
            let mut div = T::zero();
            let mut dtr = T::zero();
            for i in 0..n {
                for j in 0..n {
                    let mut cov_div = dh(i, j, k);
                    let mut cov_tr = dh(k, i, j);
                    for l in 0..n {
                        cov_div -= gamma0[l][i][j] * h[l][k] + gamma0[l][i][k] * h[j][l];
                        cov_tr -= T::lit(2.0) * gamma0[l][k][i] * h[l][j];
                    }
                    div += g0inv[i][j] * cov_div;
                    dtr += g0inv[i][j] * cov_tr;
                }
            }
            let hv = (0..n).fold(T::zero(), |acc, a| acc + h[k][a] * grad_v[a]);
            let omega = vv * (div - dtr) - hv + tr * dv[k];
            s += omega * half_w * theta[k];
        }
        Ok(s * area * T::lit(q.weight))
    })?;
    Ok(T::lit(b) * total)
}

/// `−c_n ∫ G₋₁(X⁽ⁱ⁾, ν) dσ`.
pub fn ricci_ah<T: Real>(data: &SurfaceData<T>, index: usize) -> Result<T> {
    require_chart("ricci_ah", data.chart, Chart::BallAH)?;
    ricci_form(data, index)
}

/// `(c_n/2) r_a ∫ w_i [S^ρ − (n−2)/(n−1) H² + (n−1)(n−2)] dσ` with
/// `w_0 = 1` and `w_i = xⁱ/|x|`. Components `i ≥ 1` need `τ > n − 1`.
pub fn hawking_ah<T: Real>(data: &SurfaceData<T>, index: usize, tau: f64) -> Result<T> {
    require_chart("hawking_ah", data.chart, Chart::BallAH)?;
    let n = data.n;
    if index >= 1 && !(tau > n as f64 - 1.0) {
        return Err(Error::DecayTooWeak {
            estimator: format!("hawking_ah[{index}]"),
            tau,
            needed: n as f64 - 1.0,
        });
    }
    let c = constants(n)?.c;
    let total = data.integrate(|nd| {
        let f = hawking_integrand(n, nd, true);
        if index == 0 {
            f
        } else {
            let r = (0..n).fold(T::zero(), |acc, k| acc + nd.x[k] * nd.x[k]).sqrt();
            f * nd.x[index - 1] / r
        }
    })?;
    Ok(T::lit(c / 2.0) * data.area_radius * total)
}

/// `2 b_n ∫ (H₀ − H) V⁽ⁱ⁾ dσ`.
pub fn by_ah<T: Real>(data: &SurfaceData<T>, emb: &RoundEmbedding<T>, index: usize) -> Result<T> {
    require_chart("by_ah", data.chart, Chart::BallAH)?;
    require_target("by_ah", emb, Target::Hyperbolic)?;
    let n = data.n;
    let b = constants(n)?.b;
    let v = VFunction { index };
    let total = data.integrate(|nd| (emb.h0 - nd.h) * v.value(n, &nd.x))?;
    Ok(T::lit(2.0 * b) * total)
}

/// `2 b_n ∫ (H₀ − H) x dσ` with `x` the hyperboloid position of the round
/// embedding.
pub fn by_vector_ah<T: Real>(data: &SurfaceData<T>, emb: &RoundEmbedding<T>) -> Result<Vec<T>> {
    require_chart("by_vector_ah", data.chart, Chart::BallAH)?;
    require_target("by_vector_ah", emb, Target::Hyperbolic)?;
    let n = data.n;
    let b = constants(n)?.b;
    let total = data.integrate_vec(n + 1, |nd| {
        let d = emb.h0 - nd.h;
        emb.position(&nd.theta[..n]).into_iter().map(|x| d * x).collect()
    })?;
    Ok(total.into_iter().map(|v| T::lit(2.0 * b) * v).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSummary {
    pub target: Target,
    pub radius: f64,
    pub rho_star: f64,
    pub roundness_defect: f64,
}

/// All requested estimator values at one radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub rho: f64,
    pub resolution: usize,
    pub precision: Precision,
    pub entries: Vec<ReportEntry>,
    pub embedding: Option<EmbeddingSummary>,
}

impl MassReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).and_then(|e| e.value)
    }

    pub fn columns(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportOptions {
    pub precision: Precision,
    /// Mark embedding-based estimators as skipped on non-round surfaces
    /// instead of failing.
    pub skip_not_round: bool,
}

/// Resolves `Auto` to the precision used for a chart.
pub fn resolve_precision(precision: Precision, chart: Chart) -> Precision {
    match (precision, chart) {
        (Precision::Auto, Chart::CartesianAF) => Precision::Double,
        (Precision::Auto, Chart::BallAH) => Precision::DoubleDouble,
        (p, _) => p,
    }
}

/// Validates the metric/family/estimator combination without computing.
pub fn check_compatibility(spec: &MetricSpec, family: &SurfaceFamily, estimators: &[Estimator]) -> Result<()> {
    let chart = spec.chart()?;
    if estimators.iter().any(|e| e.needs_surface()) {
        family.check_chart(chart)?;
    }
    for e in estimators {
        require_chart(e.base_name(), chart, e.chart())?;
        if let Some(i) = e.index() {
            if i > spec.n {
                return Err(Error::UnknownEstimator(e.columns(spec.n)[0].clone()));
            }
        }
        if let Estimator::HawkingAh(i) = e {
            let tau = spec.tau()?;
            if *i >= 1 && !(tau > spec.n as f64 - 1.0) {
                return Err(Error::DecayTooWeak {
                    estimator: format!("hawking_ah[{i}]"),
                    tau,
                    needed: spec.n as f64 - 1.0,
                });
            }
        }
    }
    Ok(())
}

pub fn compute_report(
    spec: &MetricSpec,
    family: &SurfaceFamily,
    rho: f64,
    grid: &QuadratureGrid,
    estimators: &[Estimator],
    opts: ReportOptions,
) -> Result<MassReport> {
    check_compatibility(spec, family, estimators)?;
    let precision = resolve_precision(opts.precision, spec.chart()?);
    match precision {
        Precision::DoubleDouble => compute_report_t::<Dd>(spec, family, rho, grid, estimators, opts, precision),
        _ => compute_report_t::<f64>(spec, family, rho, grid, estimators, opts, precision),
    }
}

fn compute_report_t<T: Real>(
    spec: &MetricSpec,
    family: &SurfaceFamily,
    rho: f64,
    grid: &QuadratureGrid,
    estimators: &[Estimator],
    opts: ReportOptions,
    precision: Precision,
) -> Result<MassReport> {
    let n = spec.n;
    let chart = spec.chart()?;
    let data = if estimators.iter().any(|e| e.needs_surface()) {
        Some(discretize::<T>(spec, family, rho, grid)?)
    } else {
        None
    };
    let target = match chart {
        Chart::CartesianAF => Target::Euclidean,
        Chart::BallAH => Target::Hyperbolic,
    };
    let embedding: Option<std::result::Result<RoundEmbedding<T>, Error>> =
        match (&data, estimators.iter().any(|e| e.needs_embedding())) {
            (Some(d), true) => Some(round_embed(d, target)),
            _ => None,
        };
    let emb = match &embedding {
        Some(Err(e)) if !opts.skip_not_round => return Err(e.clone()),
        Some(Ok(e)) => Some(e),
        _ => None,
    };
    let skip_reason = match &embedding {
        Some(Err(e)) => Some(e.to_string()),
        _ => None,
    };
    let tau = spec.tau()?;
    let mut entries = Vec::new();
    for e in estimators {
        let cols = e.columns(n);
        if e.needs_embedding() && emb.is_none() {
            for name in cols {
                entries.push(ReportEntry {
                    name,
                    value: None,
                    skipped: skip_reason.clone(),
                });
            }
            continue;
        }
        let d = || data.as_ref().expect("surface built for surface estimators");
        let em = || emb.expect("embedding built for embedding estimators");
        let values: Vec<T> = match *e {
            Estimator::AdmFlux => vec![adm_flux::<T>(spec, rho, grid)?],
            Estimator::RicciAf => vec![ricci_af(d())?],
            Estimator::HawkingAf => vec![hawking_af(d())?],
            Estimator::ByAf => vec![by_af(d(), em())?],
            Estimator::Sigma2Af => vec![sigma2_af(d(), em())?],
            Estimator::ChMass(i) => vec![ch_mass::<T>(spec, i, rho, grid)?],
            Estimator::RicciAh(i) => vec![ricci_ah(d(), i)?],
            Estimator::HawkingAh(i) => vec![hawking_ah(d(), i, tau)?],
            Estimator::ByAh(i) => vec![by_ah(d(), em(), i)?],
            Estimator::ByVectorAh => by_vector_ah(d(), em())?,
        };
        for (name, v) in cols.into_iter().zip(values) {
            entries.push(ReportEntry {
                name,
                value: Some(v.to_f64()),
                skipped: None,
            });
        }
    }
    Ok(MassReport {
        rho,
        resolution: grid.resolution,
        precision,
        entries,
        embedding: emb.map(|e| EmbeddingSummary {
            target: e.target,
            radius: e.radius.to_f64(),
            rho_star: e.rho_star(),
            roundness_defect: e.roundness_defect,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::ads_radial_profile;
    use crate::quadrature::build_grid;

    #[test]
    fn v_functions_match_geodesic_form() {
        let rho: f64 = 3.0;
        let r = (rho / 2.0).tanh();
        let theta = [0.6, 0.0, 0.8];
        let mut x = zero_vec::<f64>();
        for k in 0..3 {
            x[k] = r * theta[k];
        }
        assert!((VFunction { index: 0 }.value(3, &x) / rho.cosh() - 1.0).abs() < 1e-12);
        assert!((VFunction { index: 1 }.value(3, &x) / (0.6 * rho.sinh()) - 1.0).abs() < 1e-12);
        assert!((VFunction { index: 3 }.value(3, &x) / (0.8 * rho.sinh()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn v_gradient_matches_differences() {
        let x0 = [0.2, -0.3, 0.4];
        let h = 1e-6;
        for index in 0..=3 {
            let v = VFunction { index };
            let mut x = zero_vec::<f64>();
            x[..3].copy_from_slice(&x0);
            let g = v.gradient(3, &x);
            for k in 0..3 {
                let (mut xp, mut xm) = (x, x);
                xp[k] += h;
                xm[k] -= h;
                let fd = (v.value(3, &xp) - v.value(3, &xm)) / (2.0 * h);
                assert!((fd - g[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn estimator_parsing() {
        assert_eq!(Estimator::parse("ch_mass[2]", 3).unwrap(), vec![Estimator::ChMass(2)]);
        assert_eq!(Estimator::parse("by_ah", 3).unwrap().len(), 4);
        assert!(Estimator::parse("ch_mass[4]", 3).is_err());
        assert!(Estimator::parse("adm_flux[0]", 3).is_err());
        assert!(Estimator::parse("nonsense", 3).is_err());
        assert_eq!(Estimator::ByVectorAh.columns(3).len(), 4);
    }

    #[test]
    fn adm_flux_closed_form() {
        let grid = build_grid(3, 16).unwrap();
        for r in [10.0_f64, 50.0] {
            let v = adm_flux::<f64>(&MetricSpec::schwarzschild(3, 1.0), r, &grid).unwrap();
            let want = (1.0 + 1.0 / (2.0 * r)).powi(3);
            assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        }
        let grid4 = build_grid(4, 10).unwrap();
        let v = adm_flux::<f64>(&MetricSpec::schwarzschild(4, 1.0), 10.0, &grid4).unwrap();
        assert!((v - (1.0 + 1.0 / 200.0)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn schwarzschild_quasi_local_closed_forms() {
        let grid = build_grid(3, 16).unwrap();
        let spec = MetricSpec::schwarzschild(3, 1.0);
        let data = discretize::<f64>(&spec, &SurfaceFamily::coordinate_sphere(), 20.0, &grid).unwrap();
        let emb = round_embed(&data, Target::Euclidean).unwrap();
        let ra = data.area_radius;
        assert!((hawking_af(&data).unwrap() - 1.0).abs() < 1e-11);
        assert!((sigma2_af(&data, &emb).unwrap() - 1.0).abs() < 1e-11);
        let by = by_af(&data, &emb).unwrap();
        assert!((by - ra * (1.0 - (1.0 - 2.0 / ra).sqrt())).abs() < 1e-11);
        let ric = ricci_af(&data).unwrap();
        assert!((ric - 1.0).abs() < 0.2, "{ric}");
    }

    #[test]
    fn ads_hawking_and_brown_york_closed_forms() {
        let grid = build_grid(3, 12).unwrap();
        let spec = MetricSpec::ads_schwarzschild(3, 1.0);
        let s: f64 = 5.0;
        let data = discretize::<Dd>(&spec, &SurfaceFamily::geodesic_sphere(), s, &grid).unwrap();
        let emb = round_embed(&data, Target::Hyperbolic).unwrap();
        let hk = hawking_ah(&data, 0, 3.0).unwrap().to_f64();
        assert!((hk - 1.0).abs() < 1e-10, "{hk}");
        let r = ads_radial_profile(1.0, 3, s).unwrap().r;
        let f0 = (1.0 + r * r).sqrt();
        let f = (1.0 + r * r - 2.0 / r).sqrt();
        let want = 2.0 * s.cosh() / (f0 + f);
        let by = by_ah(&data, &emb, 0).unwrap().to_f64();
        assert!((by / want - 1.0).abs() < 1e-10, "{by} vs {want}");
        for i in 1..=3 {
            assert!(by_ah(&data, &emb, i).unwrap().to_f64().abs() < 1e-10);
            assert!(hawking_ah(&data, i, 3.0).unwrap().to_f64().abs() < 1e-10);
        }
    }

    #[test]
    fn hyperbolic_space_has_zero_mass() {
        let grid = build_grid(3, 12).unwrap();
        let spec = MetricSpec::hyperbolic_ball(3);
        let fam = SurfaceFamily::geodesic_sphere();
        let report = compute_report(&spec, &fam, 5.0, &grid, &Estimator::all_for(Chart::BallAH, 3), ReportOptions::default()).unwrap();
        for e in &report.entries {
            assert!(e.value.unwrap().abs() < 1e-10, "{}: {:?}", e.name, e.value);
        }
        assert_eq!(report.precision, Precision::DoubleDouble);
    }

    #[test]
    fn hawking_ah_needs_fast_decay() {
        let grid = build_grid(3, 8).unwrap();
        let data = discretize::<f64>(&MetricSpec::ah_perturbed(3, 1.8, 0.1), &SurfaceFamily::geodesic_sphere(), 3.0, &grid).unwrap();
        assert!(matches!(hawking_ah(&data, 1, 1.8), Err(Error::DecayTooWeak { .. })));
        assert!(hawking_ah(&data, 0, 1.8).is_ok());
    }

    #[test]
    fn not_round_skip_or_fail() {
        let grid = build_grid(3, 8).unwrap();
        let spec = MetricSpec::schwarzschild(3, 1.0);
        let fam = SurfaceFamily::perturbed_sphere(0.5);
        let ests = [Estimator::HawkingAf, Estimator::ByAf];
        let err = compute_report(&spec, &fam, 20.0, &grid, &ests, ReportOptions::default());
        assert!(matches!(err, Err(Error::NotRound { .. })));
        let opts = ReportOptions {
            skip_not_round: true,
            ..Default::default()
        };
        let rep = compute_report(&spec, &fam, 20.0, &grid, &ests, opts).unwrap();
        assert!(rep.get("hawking_af").is_some());
        assert!(rep.entries[1].value.is_none() && rep.entries[1].skipped.is_some());
    }

    #[test]
    fn wrong_chart_rejected() {
        let grid = build_grid(3, 8).unwrap();
        let r = adm_flux::<f64>(&MetricSpec::hyperbolic_ball(3), 0.5, &grid);
        assert!(matches!(r, Err(Error::WrongChart { .. })));
        let r = ch_mass::<f64>(&MetricSpec::euclidean(3), 0, 5.0, &grid);
        assert!(matches!(r, Err(Error::WrongChart { .. })));
    }
}
