//! Catalog of analytic model metrics and their exact second-order jets.
//!
//! Asymptotically flat entries live in a Cartesian chart on `ℝⁿ` minus a
//! ball. Asymptotically hyperbolic entries live in the Poincaré ball, where
//! the reference metric is `g₀ = 4/(1 − |x|²)² δ`.

mod ads;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_DIM};
use crate::real::{Dd, Real};

pub use ads::{ads_radial_profile, geodesic_coordinate, horizon_radius, RadialProfile};

pub type Vector<T> = [T; MAX_DIM];
pub type Mat<T> = [[T; MAX_DIM]; MAX_DIM];
pub type Tensor3<T> = [Mat<T>; MAX_DIM];
pub type Tensor4<T> = [Tensor3<T>; MAX_DIM];

pub(crate) fn zero_vec<T: Real>() -> Vector<T> {
    [T::zero(); MAX_DIM]
}
pub(crate) fn zero_mat<T: Real>() -> Mat<T> {
    [[T::zero(); MAX_DIM]; MAX_DIM]
}
pub(crate) fn zero_t3<T: Real>() -> Tensor3<T> {
    [zero_mat(); MAX_DIM]
}
pub(crate) fn zero_t4<T: Real>() -> Tensor4<T> {
    [zero_t3(); MAX_DIM]
}

pub const CATALOG: [&str; 6] = [
    "euclidean",
    "schwarzschild_isotropic",
    "af_perturbed",
    "hyperbolic_ball",
    "ads_schwarzschild",
    "ah_perturbed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    CartesianAF,
    BallAH,
}

impl Chart {
    pub fn label(self) -> &'static str {
        match self {
            Chart::CartesianAF => "CartesianAF",
            Chart::BallAH => "BallAH",
        }
    }
}

/// Catalog selector: a name, a dimension and named real parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Euclidean,
    Schwarzschild { m: f64 },
    AfPerturbed { m: f64, a: f64, tau: f64 },
    HyperbolicBall,
    AdsSchwarzschild { m: f64 },
    AhPerturbed { tau: f64, a: f64 },
}

impl MetricSpec {
    pub fn new(name: &str, n: usize, params: &[(&str, f64)]) -> Self {
        Self {
            name: name.to_string(),
            n,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn euclidean(n: usize) -> Self {
        Self::new("euclidean", n, &[])
    }
    pub fn schwarzschild(n: usize, m: f64) -> Self {
        Self::new("schwarzschild_isotropic", n, &[("m", m)])
    }
    pub fn af_perturbed(n: usize, m: f64, a: f64, tau: f64) -> Self {
        Self::new("af_perturbed", n, &[("m", m), ("a", a), ("tau", tau)])
    }
    pub fn hyperbolic_ball(n: usize) -> Self {
        Self::new("hyperbolic_ball", n, &[])
    }
    pub fn ads_schwarzschild(n: usize, m: f64) -> Self {
        Self::new("ads_schwarzschild", n, &[("m", m)])
    }
    pub fn ah_perturbed(n: usize, tau: f64, a: f64) -> Self {
        Self::new("ah_perturbed", n, &[("tau", tau), ("a", a)])
    }

    fn param(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("{} needs parameter `{key}`", self.name)))
    }

    fn model(&self) -> Result<Model> {
        if !(3..=MAX_DIM).contains(&self.n) {
            return Err(Error::BadDimension(self.n));
        }
        let n = self.n as f64;
        let mass = |s: &Self| -> Result<f64> {
            let m = s.param("m")?;
            if !(m >= 0.0) || !m.is_finite() {
                return Err(Error::InvalidParameter(format!("mass m = {m} must be >= 0")));
            }
            Ok(m)
        };
        let model = match self.name.as_str() {
            "euclidean" => Model::Euclidean,
            "schwarzschild_isotropic" => Model::Schwarzschild { m: mass(self)? },
            "af_perturbed" => {
                let tau = self.param("tau")?;
                if !(tau > (n - 2.0) / 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "af_perturbed needs tau > (n-2)/2, got {tau}"
                    )));
                }
                Model::AfPerturbed {
                    m: mass(self)?,
                    a: self.param("a")?,
                    tau,
                }
            }
            "hyperbolic_ball" => Model::HyperbolicBall,
            "ads_schwarzschild" => Model::AdsSchwarzschild { m: mass(self)? },
            "ah_perturbed" => {
                let tau = self.param("tau")?;
                if !(tau > n / 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "ah_perturbed needs tau > n/2, got {tau}"
                    )));
                }
                Model::AhPerturbed {
                    tau,
                    a: self.param("a")?,
                }
            }
            other => return Err(Error::UnknownMetric(other.to_string())),
        };
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.model().map(|_| ())
    }

    pub fn chart(&self) -> Result<Chart> {
        Ok(match self.model()? {
            Model::Euclidean | Model::Schwarzschild { .. } | Model::AfPerturbed { .. } => {
                Chart::CartesianAF
            }
            _ => Chart::BallAH,
        })
    }

    /// Declared decay exponent of the entry.
    pub fn tau(&self) -> Result<f64> {
        let n = self.n as f64;
        Ok(match self.model()? {
            Model::Euclidean | Model::Schwarzschild { .. } => n - 2.0,
            Model::AfPerturbed { tau, .. } => tau.min(n - 2.0),
            Model::HyperbolicBall | Model::AdsSchwarzschild { .. } => n,
            Model::AhPerturbed { tau, .. } => tau,
        })
    }

    /// Mass parameter, when the entry has one.
    pub fn mass_parameter(&self) -> Option<f64> {
        self.params.get("m").copied()
    }

    /// Inner radius of the chart domain in chart coordinates: the horizon
    /// for Schwarzschild-type entries, zero otherwise.
    pub fn inner_radius(&self) -> Result<f64> {
        let n = self.n as f64;
        Ok(match self.model()? {
            Model::Schwarzschild { m } | Model::AfPerturbed { m, .. } => {
                (m / 2.0).powf(1.0 / (n - 2.0))
            }
            Model::AdsSchwarzschild { m } => {
                if m == 0.0 {
                    0.0
                } else {
                    let r_h = horizon_radius(m, self.n);
                    let s_h = geodesic_coordinate(m, self.n, r_h)?;
                    (s_h.max(0.0) / 2.0).tanh()
                }
            }
            _ => 0.0,
        })
    }

    /// Test hook: relative corruption applied to the analytic second
    /// derivatives (parameter `jet_fault`, default 0).
    fn fault(&self) -> f64 {
        self.params.get("jet_fault").copied().unwrap_or(0.0)
    }
}

/// Metric components with exact first and second partial derivatives.
///
/// `dg[k][i][j] = ∂_k g_ij` and `ddg[k][l][i][j] = ∂_k ∂_l g_ij`.
#[derive(Debug, Clone)]
pub struct MetricJet<T: Real> {
    pub n: usize,
    pub point: Vector<T>,
    pub g: Mat<T>,
    pub dg: Tensor3<T>,
    pub ddg: Tensor4<T>,
}

/// Jet of the reference metric (Euclidean or ball-model hyperbolic).
pub type BackgroundJet<T> = MetricJet<T>;

impl<T: Real> MetricJet<T> {
    fn from_components(point: &[T], comps: &[Vec<Jet<T>>]) -> Self {
        let n = point.len();
        let mut out = Self {
            n,
            point: zero_vec(),
            g: zero_mat(),
            dg: zero_t3(),
            ddg: zero_t4(),
        };
        out.point[..n].copy_from_slice(point);
        for i in 0..n {
            for j in 0..n {
                let c = &comps[i][j];
                out.g[i][j] = c.v;
                for k in 0..n {
                    out.dg[k][i][j] = c.d[k];
                    for l in 0..n {
                        out.ddg[k][l][i][j] = c.h[k][l];
                    }
                }
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.g[i][j].is_finite()
                    && (0..n).all(|k| {
                        self.dg[k][i][j].is_finite()
                            && (0..n).all(|l| self.ddg[k][l][i][j].is_finite())
                    })
            })
        })
    }
}

fn norm_sq<T: Real>(point: &[T]) -> T {
    point.iter().fold(T::zero(), |acc, &x| acc + x * x)
}

/// `B δ_ij + C x̂_i x̂_j`-type assembly helper.
fn diag_plus<T: Real>(n: usize, diag: Jet<T>, extra: impl Fn(usize, usize) -> Option<Jet<T>>) -> Vec<Vec<Jet<T>>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let base = if i == j { diag } else { Jet::constant(n, T::zero()) };
                    match extra(i, j) {
                        Some(e) => base + e,
                        None => base,
                    }
                })
                .collect()
        })
        .collect()
}

fn schwarzschild_factor<T: Real>(n: usize, m: f64, r: &Jet<T>) -> Jet<T> {
    // ψ = u^{4/(n−2)}, u = 1 + (m/2) r^{2−n}
    let u = r.powi(2 - n as i32).scale(T::lit(m / 2.0)).add_const(T::one());
    match n {
        3 => u.powi(4),
        4 => u.powi(2),
        6 => u,
        _ => u.powf(T::lit(4.0 / (n as f64 - 2.0))),
    }
}

fn ball_factor<T: Real>(n: usize, point: &[T]) -> Jet<T> {
    // 4 / (1 − |x|²)²
    let x = Jet::vars(point);
    let r2 = x.iter().skip(1).fold(x[0] * x[0], |acc, &xi| acc + xi * xi);
    let w = (-r2).add_const(T::one());
    Jet::constant(n, T::lit(4.0)) / (w * w)
}

fn check_finite<T: Real>(spec: &MetricSpec, point: &[T]) -> Result<()> {
    if point.len() != spec.n {
        return Err(Error::OutOfDomain(format!(
            "point has {} components, metric dimension is {}",
            point.len(),
            spec.n
        )));
    }
    if point.iter().any(|x| !x.is_finite()) {
        return Err(Error::OutOfDomain("non-finite coordinate".into()));
    }
    Ok(())
}

/// Exact jet of the catalog metric at `point`.
pub fn eval_jet<T: Real>(spec: &MetricSpec, point: &[T]) -> Result<MetricJet<T>> {
    let model = spec.model()?;
    check_finite(spec, point)?;
    let n = spec.n;
    let r2 = norm_sq(point);
    let radius = r2.sqrt().to_f64();
    let describe = || format!("|x| = {radius:e} for {}", spec.name);
    let comps: Vec<Vec<Jet<T>>> = match model {
        Model::Euclidean => diag_plus(n, Jet::constant(n, T::one()), |_, _| None),
        Model::Schwarzschild { m } | Model::AfPerturbed { m, .. } => {
            let r_in = spec.inner_radius()?;
            if !(radius > r_in) || radius == 0.0 {
                return Err(Error::OutOfDomain(describe()));
            }
            let x = Jet::vars(point);
            let r = x.iter().skip(1).fold(x[0] * x[0], |acc, &xi| acc + xi * xi).sqrt();
            let psi = schwarzschild_factor(n, m, &r);
            match model {
                Model::AfPerturbed { a, tau, .. } => {
                    // a r^{−τ} (x̂₁ δ_ij + x̂₂ x̂_i x̂_j)
                    let inv_r = r.recip();
                    let xh: Vec<Jet<T>> = x.iter().map(|&xi| xi * inv_r).collect();
                    let amp = r.powf(T::lit(-tau)).scale(T::lit(a));
                    let diag = psi + amp * xh[0];
                    let lift = amp * xh[1];
                    diag_plus(n, diag, |i, j| Some(lift * xh[i] * xh[j]))
                }
                _ => diag_plus(n, psi, |_, _| None),
            }
        }
        Model::HyperbolicBall => {
            if !(radius < 1.0) {
                return Err(Error::OutOfDomain(describe()));
            }
            diag_plus(n, ball_factor(n, point), |_, _| None)
        }
        Model::AhPerturbed { tau, a } => {
            if !(radius < 1.0) || radius == 0.0 {
                return Err(Error::OutOfDomain(describe()));
            }
            // φ (δ_ij + a e^{−τρ} (x̂₁ δ_ij + (1 + x̂₂) x̂_i x̂_j)), e^{−ρ} = (1 − R)/(1 + R)
            let phi = ball_factor(n, point);
            let x = Jet::vars(point);
            let r = x.iter().skip(1).fold(x[0] * x[0], |acc, &xi| acc + xi * xi).sqrt();
            let inv_r = r.recip();
            let xh: Vec<Jet<T>> = x.iter().map(|&xi| xi * inv_r).collect();
            let decay = ((-r).add_const(T::one()) / r.add_const(T::one()))
                .powf(T::lit(tau))
                .scale(T::lit(a));
            let diag = phi * (decay * xh[0]).add_const(T::one());
            let radial = phi * decay * xh[1].add_const(T::one());
            diag_plus(n, diag, |i, j| Some(radial * xh[i] * xh[j]))
        }
        Model::AdsSchwarzschild { m } => {
            let r_in = spec.inner_radius()?;
            if !(radius < 1.0) || !(radius > r_in) || radius == 0.0 {
                return Err(Error::OutOfDomain(describe()));
            }
            ads_components(n, m, point)?
        }
    };
    let mut jet = MetricJet::from_components(point, &comps);
    let fault = spec.fault();
    if fault != 0.0 {
        let f = T::lit(1.0 + fault);
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        jet.ddg[k][l][i][j] *= f;
                    }
                }
            }
        }
    }
    if !jet.is_finite() {
        return Err(Error::OutOfDomain(format!("non-finite jet at {}", describe())));
    }
    Ok(jet)
}

/// AdS-Schwarzschild in ball coordinates: with `R = |x| = tanh(s/2)`,
/// `g = s'(R)² x̂x̂ + (r(s)/R)² (δ − x̂x̂)`.
fn ads_components<T: Real>(n: usize, m: f64, point: &[T]) -> Result<Vec<Vec<Jet<T>>>> {
    let x = Jet::vars(point);
    let r2 = x.iter().skip(1).fold(x[0] * x[0], |acc, &xi| acc + xi * xi);
    let big_r = r2.sqrt();
    let rv = big_r.v;
    let one = T::one();
    let two = T::lit(2.0);
    let w = one - rv * rv;
    let s_val = two * rv.atanh();
    let s = big_r.chain(s_val, two / w, T::lit(4.0) * rv / (w * w));
    let profile = ads_radial_profile(m, n, s_val.to_f64())
        .map_err(|e| Error::OutOfDomain(format!("ads_schwarzschild at |x| = {}: {e}", rv.to_f64())))?;
    let r = s_val.sinh() + T::lit(profile.excess);
    let nn = n as i32;
    let mm = T::lit(m);
    let dr = (one + r * r - two * mm * r.powi(2 - nn)).sqrt();
    let ddr = r + T::lit(n as f64 - 2.0) * mm * r.powi(1 - nn);
    let area = s.chain(r, dr, ddr);
    let radial = {
        let q = (-r2).add_const(one);
        Jet::constant(n, T::lit(4.0)) / (q * q)
    };
    let tangential = (area * area) / r2;
    let diff = (radial - tangential) / r2;
    Ok(diag_plus(n, tangential, |i, j| Some(diff * x[i] * x[j])))
}

/// Exact jet of the reference metric: `δ` in the Cartesian chart, the
/// ball-model hyperbolic metric in the ball chart.
pub fn eval_background_jet<T: Real>(spec: &MetricSpec, point: &[T]) -> Result<BackgroundJet<T>> {
    check_finite(spec, point)?;
    let n = spec.n;
    let comps = match spec.chart()? {
        Chart::CartesianAF => diag_plus(n, Jet::constant(n, T::one()), |_, _| None),
        Chart::BallAH => {
            if !(norm_sq(point) < T::one()) {
                return Err(Error::OutOfDomain(format!(
                    "|x| = {} outside the unit ball",
                    norm_sq(point).sqrt().to_f64()
                )));
            }
            diag_plus(n, ball_factor(n, point), |_, _| None)
        }
    };
    Ok(MetricJet::from_components(point, &comps))
}

/// Components `g(ε_i, ε_j)` in the orthonormal frame `ε_i = ((1 − |x|²)/2) ∂_i`
/// of the ball-model background.
pub fn ball_frame_components<T: Real>(jet: &MetricJet<T>) -> Mat<T> {
    let r2 = norm_sq(&jet.point[..jet.n]);
    let s = (T::one() - r2) / T::lit(2.0);
    let mut out = zero_mat();
    for i in 0..jet.n {
        for j in 0..jet.n {
            out[i][j] = jet.g[i][j] * s * s;
        }
    }
    out
}

/// Compares the analytic jet against 5-point central differences of the
/// metric values alone. Returns the maximum deviation of `dg` and `ddg`,
/// each relative to the largest analytic component of that order (with
/// `1e-12·max|g|` as a floor). Stencils are evaluated in double-double so
/// that only the `O(h⁴)` truncation error remains.
pub fn fd_check_jet(spec: &MetricSpec, point: &[f64], h: f64) -> Result<(f64, f64)> {
    let n = spec.n;
    if point.len() != n {
        return Err(Error::BadDimension(point.len()));
    }
    let base: Vec<Dd> = point.iter().map(|&x| Dd::lit(x)).collect();
    let jet = eval_jet::<Dd>(spec, &base)?;
    let hd = Dd::lit(h);
    let shifted = |dirs: &[(usize, f64)]| -> Result<Mat<Dd>> {
        let mut p = base.clone();
        for &(k, off) in dirs {
            p[k] += Dd::lit(off) * hd;
        }
        Ok(eval_jet::<Dd>(spec, &p)?.g)
    };
    const C1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    const C2: [(f64, f64); 5] = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];
    let mut fd_dg = zero_t3::<Dd>();
    let mut fd_ddg = zero_t4::<Dd>();
    let twelve = Dd::lit(12.0);
    for k in 0..n {
        let mut acc = zero_mat::<Dd>();
        for &(o, w) in &C1 {
            let gk = shifted(&[(k, o)])?;
            for i in 0..n {
                for j in 0..n {
                    acc[i][j] += Dd::lit(w) * gk[i][j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                fd_dg[k][i][j] = acc[i][j] / (twelve * hd);
            }
        }
    }
    for k in 0..n {
        for l in k..n {
            let mut acc = zero_mat::<Dd>();
            let mut add = |w: f64, g: &Mat<Dd>| {
                for i in 0..n {
                    for j in 0..n {
                        acc[i][j] += Dd::lit(w) * g[i][j];
                    }
                }
            };
            if k == l {
                for &(o, w) in &C2 {
                    let gk = if o == 0.0 { jet.g } else { shifted(&[(k, o)])? };
                    add(w, &gk);
                }
            } else {
                for &(ok, wk) in &C1 {
                    for &(ol, wl) in &C1 {
                        add(wk * wl / 12.0, &shifted(&[(k, ok), (l, ol)])?);
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    fd_ddg[k][l][i][j] = acc[i][j] / (twelve * hd * hd);
                    fd_ddg[l][k][i][j] = fd_ddg[k][l][i][j];
                }
            }
        }
    }
    let mut g_max = 0.0_f64;
    let (mut d_max, mut dd_max, mut d_err, mut dd_err) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..n {
        for j in 0..n {
            g_max = g_max.max(jet.g[i][j].to_f64().abs());
            for k in 0..n {
                d_max = d_max.max(jet.dg[k][i][j].to_f64().abs());
                d_err = d_err.max((jet.dg[k][i][j] - fd_dg[k][i][j]).to_f64().abs());
                for l in 0..n {
                    dd_max = dd_max.max(jet.ddg[k][l][i][j].to_f64().abs());
                    dd_err = dd_err.max((jet.ddg[k][l][i][j] - fd_ddg[k][l][i][j]).to_f64().abs());
                }
            }
        }
    }
    let floor = g_max * 1e-12;
    Ok((d_err / d_max.max(floor), dd_err / dd_max.max(floor)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_jet_is_flat() {
        let jet = eval_jet::<f64>(&MetricSpec::euclidean(3), &[1.0, 2.0, 2.0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(jet.g[i][j], if i == j { 1.0 } else { 0.0 });
                for k in 0..3 {
                    assert_eq!(jet.dg[k][i][j], 0.0);
                    for l in 0..3 {
                        assert_eq!(jet.ddg[k][l][i][j], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn schwarzschild_conformal_factor() {
        let r = 5.0;
        let jet = eval_jet::<f64>(&MetricSpec::schwarzschild(3, 1.0), &[r, 0.0, 0.0]).unwrap();
        let u: f64 = 1.0 + 1.0 / (2.0 * r);
        assert!((jet.g[0][0] - u.powi(4)).abs() < 1e-14);
        assert!((jet.g[1][1] - u.powi(4)).abs() < 1e-14);
        assert_eq!(jet.g[0][1], 0.0);
        // ∂_r ψ = 4u³ · (−1/(2r²)) along the x-axis
        let dpsi = 4.0 * u.powi(3) * (-0.5 / (r * r));
        assert!((jet.dg[0][0][0] - dpsi).abs() < 1e-14);
        // ∂_r² ψ = 12u² (1/(2r²))² + 4u³ (1/r³)
        let ddpsi = 12.0 * u * u * (0.25 / r.powi(4)) + 4.0 * u.powi(3) / r.powi(3);
        assert!((jet.ddg[0][0][1][1] - ddpsi).abs() < 1e-14);
    }

    #[test]
    fn ball_model_value() {
        let jet = eval_jet::<f64>(&MetricSpec::hyperbolic_ball(3), &[0.5, 0.0, 0.0]).unwrap();
        assert!((jet.g[0][0] - 64.0 / 9.0).abs() < 1e-13);
        assert!((jet.g[2][2] - 64.0 / 9.0).abs() < 1e-13);
        let bg = eval_background_jet::<f64>(&MetricSpec::hyperbolic_ball(3), &[0.0; 3]).unwrap();
        assert_eq!(bg.g[1][1], 4.0);
        assert_eq!(bg.dg[0][1][1], 0.0);
    }

    #[test]
    fn background_af_is_identity() {
        let bg = eval_background_jet::<f64>(&MetricSpec::schwarzschild(3, 1.0), &[3.0, 1.0, 0.0]).unwrap();
        assert_eq!(bg.g[0][0], 1.0);
        assert_eq!(bg.dg[2][0][0], 0.0);
    }

    #[test]
    fn domain_errors() {
        let s = MetricSpec::schwarzschild(3, 1.0);
        assert!(matches!(eval_jet::<f64>(&s, &[0.2, 0.0, 0.0]), Err(Error::OutOfDomain(_))));
        let h = MetricSpec::hyperbolic_ball(3);
        assert!(matches!(eval_jet::<f64>(&h, &[1.0, 0.0, 0.0]), Err(Error::OutOfDomain(_))));
        let bad = MetricSpec::new("kerr", 3, &[]);
        assert!(matches!(eval_jet::<f64>(&bad, &[1.0, 0.0, 0.0]), Err(Error::UnknownMetric(_))));
    }

    #[test]
    fn parameter_validation() {
        assert!(MetricSpec::af_perturbed(3, 1.0, 0.3, 0.4).validate().is_err());
        assert!(MetricSpec::ah_perturbed(3, 1.4, 0.2).validate().is_err());
        assert!(MetricSpec::schwarzschild(3, -1.0).validate().is_err());
        assert!(MetricSpec::schwarzschild(2, 1.0).validate().is_err());
        assert!(MetricSpec::ah_perturbed(3, 3.5, 0.2).validate().is_ok());
    }

    #[test]
    fn massless_entries_reduce_to_backgrounds() {
        let p = [0.3, -0.2, 0.1];
        let a = eval_jet::<f64>(&MetricSpec::schwarzschild(3, 0.0), &p).unwrap();
        let b = eval_jet::<f64>(&MetricSpec::euclidean(3), &p).unwrap();
        assert_eq!(a.g, b.g);
        let p = [0.5, -0.3, 0.4];
        let a = eval_jet::<f64>(&MetricSpec::ads_schwarzschild(3, 0.0), &p).unwrap();
        let b = eval_jet::<f64>(&MetricSpec::hyperbolic_ball(3), &p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.g[i][j] - b.g[i][j]).abs() <= 1e-12 * b.g[0][0]);
                for k in 0..3 {
                    assert!((a.dg[k][i][j] - b.dg[k][i][j]).abs() <= 1e-11 * b.g[0][0]);
                }
            }
        }
    }

    #[test]
    fn fd_oracle_on_schwarzschild() {
        let (e1, e2) = fd_check_jet(&MetricSpec::schwarzschild(3, 1.0), &[5.0, 0.0, 0.0], 1e-4).unwrap();
        assert!(e1 <= 1e-6 && e2 <= 1e-6, "{e1:e} {e2:e}");
    }

    #[test]
    fn fd_oracle_on_ads_schwarzschild() {
        let p = [(2.5_f64).tanh(), 0.0, 0.0];
        let (e1, e2) = fd_check_jet(&MetricSpec::ads_schwarzschild(3, 1.0), &p, 1e-4).unwrap();
        assert!(e1 <= 1e-5 && e2 <= 1e-5, "{e1:e} {e2:e}");
    }

    #[test]
    fn fd_oracle_on_euclidean_is_exact() {
        let (e1, e2) = fd_check_jet(&MetricSpec::euclidean(3), &[1.0, 2.0, 2.0], 1e-3).unwrap();
        assert_eq!((e1, e2), (0.0, 0.0));
    }

    #[test]
    fn fault_hook_breaks_oracle() {
        let mut spec = MetricSpec::schwarzschild(3, 1.0);
        spec.params.insert("jet_fault".into(), 1e-3);
        let (_, e2) = fd_check_jet(&spec, &[5.0, 0.0, 0.0], 1e-4).unwrap();
        assert!(e2 > 1e-6);
    }
}
