//! Discretized hypersurface families `Σ_ρ` and their shape data.
//!
//! Every node carries tangents from exact differentiation of the
//! parametrization, the outward `g`-unit normal, the induced metric, the
//! second fundamental form `A(u, v) = g(∇_u ν, v)` (positive on Euclidean
//! spheres), principal curvatures and the intrinsic scalar curvature from
//! the Gauss equation `S^ρ = S − 2 Ric(ν, ν) + H² − |A|²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{CurvaturePoint, Lambda};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{determinant_spd, generalized_eigenvalues, inverse_spd};
use crate::metric::{eval_jet, zero_mat, zero_vec, Chart, Mat, MetricSpec, Vector};
use crate::quadrature::{QuadNode, QuadratureGrid};
use crate::real::Real;
use crate::sum::KahanSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    CoordinateSphere,
    PerturbedSphere,
    GeodesicSphere,
}

impl FamilyKind {
    pub fn label(self) -> &'static str {
        match self {
            FamilyKind::CoordinateSphere => "coordinate_sphere",
            FamilyKind::PerturbedSphere => "perturbed_sphere",
            FamilyKind::GeodesicSphere => "geodesic_sphere",
        }
    }
}

/// A one-parameter family of closed hypersurfaces.
///
/// `PerturbedSphere` is the radial graph `|x| = ρ + a·Y(θ)` with the fixed
/// degree-2 harmonic `Y = (n θ_n² − 1)/(n − 1)`. `GeodesicSphere` is the
/// background geodesic sphere `|x| = tanh(ρ/2)` of the ball model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFamily {
    pub kind: FamilyKind,
    #[serde(default)]
    pub amplitude: f64,
}

impl SurfaceFamily {
    pub fn coordinate_sphere() -> Self {
        Self {
            kind: FamilyKind::CoordinateSphere,
            amplitude: 0.0,
        }
    }
    pub fn perturbed_sphere(amplitude: f64) -> Self {
        Self {
            kind: FamilyKind::PerturbedSphere,
            amplitude,
        }
    }
    pub fn geodesic_sphere() -> Self {
        Self {
            kind: FamilyKind::GeodesicSphere,
            amplitude: 0.0,
        }
    }

    pub fn check_chart(&self, chart: Chart) -> Result<()> {
        let ok = match self.kind {
            FamilyKind::CoordinateSphere | FamilyKind::PerturbedSphere => chart == Chart::CartesianAF,
            FamilyKind::GeodesicSphere => chart == Chart::BallAH,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::WrongFamily {
                family: self.kind.label().into(),
                chart: chart.label(),
            })
        }
    }

    /// Exactly round in the background (no perturbation).
    pub fn is_centered_sphere(&self) -> bool {
        self.kind != FamilyKind::PerturbedSphere || self.amplitude == 0.0
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceNode<T: Real> {
    /// Unit vector on `S^{n−1}` parametrizing the node.
    pub theta: Vector<T>,
    pub x: Vector<T>,
    pub tangents: Vec<Vector<T>>,
    /// Outward `g`-unit normal (contravariant components).
    pub nu: Vector<T>,
    pub sigma: Mat<T>,
    /// Round metric of the unit sphere in the same parametrization.
    pub round: Mat<T>,
    pub a: Mat<T>,
    pub h: T,
    pub kappa: Vec<T>,
    pub anorm2: T,
    pub aring: T,
    pub srho: T,
    /// Ambient scalar curvature and `Ric(ν, ν)`.
    pub scalar: T,
    pub ric_nn: T,
    /// `G_λ` of the chart's background (λ = 0 or −1).
    pub g_lambda: Mat<T>,
    /// Area weight: `√(det σ / det h₀)` times the quadrature weight.
    pub dsigma: T,
}

impl<T: Real> SurfaceNode<T> {
    /// `σ₂(κ) = ½(H² − |A|²)`, the second characteristic coefficient.
    pub fn sigma2(&self) -> T {
        T::lit(0.5) * (self.h * self.h - self.anorm2)
    }

    /// `G_λ(ν, ν)`.
    pub fn g_nn(&self, n: usize) -> T {
        contract(n, &self.g_lambda, &self.nu, &self.nu)
    }

    /// `|2 G_λ(ν, ν) − (H² − |A|² − S^ρ + λ(n−1)(n−2))|`.
    pub fn gauss_residual(&self, n: usize, lambda: Lambda) -> f64 {
        let c = T::lit(lambda.value() * ((n - 1) * (n - 2)) as f64);
        let lhs = T::lit(2.0) * self.g_nn(n);
        let rhs = self.h * self.h - self.anorm2 - self.srho + c;
        (lhs - rhs).abs().to_f64()
    }
}

pub(crate) fn contract<T: Real>(n: usize, m: &Mat<T>, u: &Vector<T>, v: &Vector<T>) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            s += m[i][j] * u[i] * v[j];
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct SurfaceData<T: Real> {
    pub spec: MetricSpec,
    pub family: SurfaceFamily,
    pub rho: f64,
    pub n: usize,
    pub chart: Chart,
    pub lambda: Lambda,
    pub resolution: usize,
    pub nodes: Vec<SurfaceNode<T>>,
    pub area: T,
    pub area_radius: T,
}

/// `(cos, sin)` pairs renormalized in working precision so that the
/// parametrization and its derivatives are mutually exact.
fn angle_pairs<T: Real>(node: &QuadNode) -> Vec<(T, T)> {
    node.cs
        .iter()
        .map(|&(c, s)| {
            let (c, s) = (T::lit(c), T::lit(s));
            let r = (c * c + s * s).sqrt();
            (c / r, s / r)
        })
        .collect()
}

/// Unit vector of a quadrature node in working precision.
pub fn unit_vector_t<T: Real>(n: usize, node: &QuadNode) -> Vector<T> {
    let pairs = angle_pairs::<T>(node);
    let mut theta = zero_vec::<T>();
    let mut prod = T::one();
    for (k, &(c, s)) in pairs.iter().enumerate().take(n - 2) {
        theta[n - 1 - k] = prod * c;
        prod = prod * s;
    }
    let (c, s) = pairs[n - 2];
    theta[0] = prod * c;
    theta[1] = prod * s;
    theta
}

/// Unit-sphere embedding `θ(a₁, …, a_{n−1})` as jets in the angles.
fn theta_jets<T: Real>(n: usize, pairs: &[(T, T)]) -> Vec<Jet<T>> {
    let m = n - 1;
    let cos_j = |k: usize| {
        let (c, s) = pairs[k];
        Jet::var(m, k, T::zero()).chain(c, -s, -c)
    };
    let sin_j = |k: usize| {
        let (c, s) = pairs[k];
        Jet::var(m, k, T::zero()).chain(s, c, -s)
    };
    let mut theta = vec![Jet::constant(m, T::zero()); n];
    let mut prod = Jet::constant(m, T::one());
    for k in 0..n - 2 {
        theta[n - 1 - k] = prod * cos_j(k);
        prod = prod * sin_j(k);
    }
    theta[0] = prod * cos_j(n - 2);
    theta[1] = prod * sin_j(n - 2);
    theta
}

fn radius_jet<T: Real>(n: usize, family: &SurfaceFamily, rho: f64, theta: &[Jet<T>]) -> Jet<T> {
    let m = n - 1;
    match family.kind {
        FamilyKind::CoordinateSphere => Jet::constant(m, T::lit(rho)),
        FamilyKind::GeodesicSphere => Jet::constant(m, (T::lit(rho) / T::lit(2.0)).tanh()),
        FamilyKind::PerturbedSphere => {
            let tn = theta[n - 1];
            let y = (tn * tn).scale(T::lit(n as f64)).add_const(-T::one()).scale(T::one() / T::lit(n as f64 - 1.0));
            y.scale(T::lit(family.amplitude)).add_const(T::lit(rho))
        }
    }
}

fn build_node<T: Real>(
    spec: &MetricSpec,
    family: &SurfaceFamily,
    rho: f64,
    lambda: Lambda,
    n: usize,
    idx: usize,
    q: &QuadNode,
) -> Result<SurfaceNode<T>> {
    let m = n - 1;
    let pairs = angle_pairs::<T>(q);
    let theta_j = theta_jets(n, &pairs);
    let radius = radius_jet(n, family, rho, &theta_j);
    let mut theta = zero_vec::<T>();
    let mut x = zero_vec::<T>();
    let mut tangents = vec![zero_vec::<T>(); m];
    let mut second = vec![vec![zero_vec::<T>(); m]; m];
    let mut round = zero_mat::<T>();
    for k in 0..n {
        let xk = radius * theta_j[k];
        theta[k] = theta_j[k].v;
        x[k] = xk.v;
        for a in 0..m {
            tangents[a][k] = xk.d[a];
            for b in 0..m {
                second[a][b][k] = xk.h[a][b];
            }
        }
    }
    for a in 0..m {
        for b in 0..m {
            round[a][b] = (0..n).fold(T::zero(), |acc, k| acc + theta_j[k].d[a] * theta_j[k].d[b]);
        }
    }
    let jet = eval_jet::<T>(spec, &x[..n])?;
    let cp = CurvaturePoint::new(&jet)?;
    let g = &cp.g;

    let mut sigma = zero_mat::<T>();
    for a in 0..m {
        for b in a..m {
            let v = contract(n, g, &tangents[a], &tangents[b]);
            sigma[a][b] = v;
            sigma[b][a] = v;
        }
    }
    let sigma_inv = inverse_spd(m, &sigma).map_err(|_| Error::EigFailure { node: idx })?;

    // ν ∝ x − Σ σ^{ab} g(x, e_a) e_b, outward for star-shaped surfaces
    let gx: Vec<T> = (0..m).map(|a| contract(n, g, &x, &tangents[a])).collect();
    let mut v = x;
    for a in 0..m {
        for b in 0..m {
            let c = sigma_inv[a][b] * gx[a];
            for k in 0..n {
                v[k] -= c * tangents[b][k];
            }
        }
    }
    let vnorm = contract(n, g, &v, &v).sqrt();
    let mut nu = zero_vec::<T>();
    for k in 0..n {
        nu[k] = v[k] / vnorm;
    }
    let mut nu_low = zero_vec::<T>();
    for k in 0..n {
        nu_low[k] = (0..n).fold(T::zero(), |acc, l| acc + g[k][l] * nu[l]);
    }

    // A_ab = −ν_k (∂_a∂_b x^k + Γ^k_ij e_a^i e_b^j)
    let mut a_form = zero_mat::<T>();
    for a in 0..m {
        for b in a..m {
            let mut s = T::zero();
            for k in 0..n {
                let mut acc = second[a][b][k];
                for i in 0..n {
                    for j in 0..n {
                        acc += cp.gamma[k][i][j] * tangents[a][i] * tangents[b][j];
                    }
                }
                s -= nu_low[k] * acc;
            }
            a_form[a][b] = s;
            a_form[b][a] = s;
        }
    }
    let mut shape = zero_mat::<T>();
    for a in 0..m {
        for b in 0..m {
            shape[a][b] = (0..m).fold(T::zero(), |acc, c| acc + sigma_inv[a][c] * a_form[c][b]);
        }
    }
    let h = (0..m).fold(T::zero(), |acc, a| acc + shape[a][a]);
    let mut anorm2 = T::zero();
    for a in 0..m {
        for b in 0..m {
            anorm2 += shape[a][b] * shape[b][a];
        }
    }
    let kappa = generalized_eigenvalues(m, &a_form, &sigma).map_err(|_| Error::EigFailure { node: idx })?;
    // traceless part formed before squaring, so round spheres give |Å| at
    // round-off rather than at its square root
    let mean = h / T::lit(m as f64);
    let mut aring2 = T::zero();
    for a in 0..m {
        for b in 0..m {
            let d = |x: usize, y: usize| if x == y { mean } else { T::zero() };
            aring2 += (shape[a][b] - d(a, b)) * (shape[b][a] - d(b, a));
        }
    }
    let ric_nn = contract(n, &cp.ric, &nu, &nu);
    let srho = cp.scalar - T::lit(2.0) * ric_nn + h * h - anorm2;

    let det_sigma = determinant_spd(m, &sigma).map_err(|_| Error::EigFailure { node: idx })?;
    let det_round = determinant_spd(m, &round).map_err(|_| Error::EigFailure { node: idx })?;
    let dsigma = (det_sigma / det_round).sqrt() * T::lit(q.weight);

    Ok(SurfaceNode {
        theta,
        x,
        tangents,
        nu,
        sigma,
        round,
        a: a_form,
        h,
        kappa,
        anorm2,
        aring: aring2.max(T::zero()).sqrt(),
        srho,
        scalar: cp.scalar,
        ric_nn,
        g_lambda: cp.g_lambda(lambda),
        dsigma,
    })
}

pub fn chart_lambda(chart: Chart) -> Lambda {
    match chart {
        Chart::CartesianAF => Lambda::Flat,
        Chart::BallAH => Lambda::Hyperbolic,
    }
}

/// Builds `Σ_ρ` of `family` in the metric `spec` on the quadrature grid.
pub fn discretize<T: Real>(
    spec: &MetricSpec,
    family: &SurfaceFamily,
    rho: f64,
    grid: &QuadratureGrid,
) -> Result<SurfaceData<T>> {
    let chart = spec.chart()?;
    family.check_chart(chart)?;
    let n = spec.n;
    if grid.n != n {
        return Err(Error::BadDimension(grid.n));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::OutOfDomain(format!("surface parameter rho = {rho}")));
    }
    let lambda = chart_lambda(chart);
    let nodes: Vec<SurfaceNode<T>> = grid
        .nodes
        .par_iter()
        .enumerate()
        .map(|(idx, q)| build_node(spec, family, rho, lambda, n, idx, q))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = KahanSum::new();
    for node in &nodes {
        acc.add(node.dsigma);
    }
    let area = acc.total();
    // Normalize by the discrete sphere volume so round spheres get their
    // radius to working precision.
    let mut wsum = KahanSum::new();
    for q in &grid.nodes {
        wsum.add(T::lit(q.weight));
    }
    let omega = wsum.total();
    let area_radius = area_radius_from(n, area / omega);
    Ok(SurfaceData {
        spec: spec.clone(),
        family: *family,
        rho,
        n,
        chart,
        lambda,
        resolution: grid.resolution,
        nodes,
        area,
        area_radius,
    })
}

fn area_radius_from<T: Real>(n: usize, ratio: T) -> T {
    match n {
        3 => ratio.sqrt(),
        4 => ratio.cbrt(),
        5 => ratio.sqrt().sqrt(),
        _ => ratio.powf(T::lit(1.0 / (n as f64 - 1.0))),
    }
}

impl<T: Real> SurfaceData<T> {
    /// `Σ f(node) dσ` with compensated summation in node order.
    pub fn integrate<F: Fn(&SurfaceNode<T>) -> T>(&self, f: F) -> Result<T> {
        let mut acc = KahanSum::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let v = f(node);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: i });
            }
            acc.add(v * node.dsigma);
        }
        Ok(acc.total())
    }

    /// Vector-valued integral, one compensated sum per component.
    pub fn integrate_vec<F: Fn(&SurfaceNode<T>) -> Vec<T>>(&self, dim: usize, f: F) -> Result<Vec<T>> {
        let mut acc = vec![KahanSum::new(); dim];
        for (i, node) in self.nodes.iter().enumerate() {
            let v = f(node);
            for (k, x) in v.into_iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFiniteIntegrand { node: i });
                }
                acc[k].add(x * node.dsigma);
            }
        }
        Ok(acc.iter().map(|a| a.total()).collect())
    }

    pub fn max_gauss_residual(&self) -> f64 {
        self.nodes
            .iter()
            .map(|nd| nd.gauss_residual(self.n, self.lambda))
            .fold(0.0, f64::max)
    }
}

/// Checks of the nearly-round conditions that are computable node-wise.
/// The `ρ|∇Å|` term and the diameter bound are not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearlyRoundReport {
    /// `sup |Å| · ρ^{1+τ}`.
    pub aring_scaled: f64,
    /// `|Σ_ρ| / ρ^{n−1}`.
    pub area_scaled: f64,
    pub max_radius_ratio: f64,
    pub min_radius_ratio: f64,
    pub gradient_term_checked: bool,
    pub diameter_checked: bool,
}

pub fn nearly_round_diagnostics<T: Real>(data: &SurfaceData<T>, tau: f64) -> NearlyRoundReport {
    let rho = data.rho;
    let n = data.n;
    let mut sup_aring = 0.0_f64;
    let (mut rmax, mut rmin) = (0.0_f64, f64::INFINITY);
    for node in &data.nodes {
        sup_aring = sup_aring.max(node.aring.to_f64());
        let r = (0..n).fold(0.0, |acc, k| acc + node.x[k].to_f64().powi(2)).sqrt();
        rmax = rmax.max(r);
        rmin = rmin.min(r);
    }
    NearlyRoundReport {
        aring_scaled: sup_aring * rho.powf(1.0 + tau),
        area_scaled: data.area.to_f64() / rho.powi(n as i32 - 1),
        max_radius_ratio: rmax / rho,
        min_radius_ratio: rmin / rho,
        gradient_term_checked: false,
        diameter_checked: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_round_sphere() {
        let grid = build_grid(3, 16).unwrap();
        let data = discretize::<f64>(&MetricSpec::euclidean(3), &SurfaceFamily::coordinate_sphere(), 2.0, &grid).unwrap();
        for node in &data.nodes {
            assert!((node.h - 1.0).abs() < 1e-14);
            assert!((node.kappa[0] - 0.5).abs() < 1e-14 && (node.kappa[1] - 0.5).abs() < 1e-14);
            assert!((node.srho - 0.5).abs() < 1e-14);
            assert!(node.aring < 1e-7);
        }
        assert!((data.area - 16.0 * PI).abs() < 1e-12);
        assert!((data.area_radius - 2.0).abs() < 1e-14);
        let one = data.integrate(|_| 1.0).unwrap();
        assert!((one - 16.0 * PI).abs() < 1e-12);
        let h = data.integrate(|nd| nd.h).unwrap();
        assert!((h - 16.0 * PI).abs() < 1e-12);
        let diag = nearly_round_diagnostics(&data, 1.0);
        assert!(diag.aring_scaled < 1e-6);
    }

    #[test]
    fn hyperbolic_geodesic_sphere() {
        let grid = build_grid(3, 16).unwrap();
        let rho: f64 = 2.0;
        let data = discretize::<f64>(&MetricSpec::hyperbolic_ball(3), &SurfaceFamily::geodesic_sphere(), rho, &grid).unwrap();
        let coth = 1.0 / rho.tanh();
        for node in &data.nodes {
            assert!((node.h - 2.0 * coth).abs() < 1e-12);
            assert!((node.kappa[0] - coth).abs() < 1e-12);
            assert!((node.srho - 2.0 / rho.sinh().powi(2)).abs() < 1e-12);
            assert!(node.gauss_residual(3, Lambda::Hyperbolic) < 1e-10);
        }
        assert!((data.area / (4.0 * PI * rho.sinh().powi(2)) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn normal_is_unit_and_orthogonal() {
        let grid = build_grid(3, 12).unwrap();
        let spec = MetricSpec::af_perturbed(3, 1.0, 0.3, 1.5);
        let data = discretize::<f64>(&spec, &SurfaceFamily::perturbed_sphere(0.5), 10.0, &grid).unwrap();
        for node in &data.nodes {
            let jet = eval_jet::<f64>(&spec, &node.x[..3]).unwrap();
            assert!((contract(3, &jet.g, &node.nu, &node.nu) - 1.0).abs() < 1e-12);
            for t in &node.tangents {
                assert!(contract(3, &jet.g, &node.nu, t).abs() < 1e-10);
            }
            let ksum: f64 = node.kappa.iter().sum();
            let ksq: f64 = node.kappa.iter().map(|k| k * k).sum();
            assert!((ksum - node.h).abs() < 1e-12);
            assert!((ksq - node.anorm2).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_family_for_chart() {
        let grid = build_grid(3, 8).unwrap();
        let r = discretize::<f64>(&MetricSpec::hyperbolic_ball(3), &SurfaceFamily::coordinate_sphere(), 0.5, &grid);
        assert!(matches!(r, Err(Error::WrongFamily { .. })));
    }

    #[test]
    fn non_finite_integrand_reported() {
        let grid = build_grid(3, 8).unwrap();
        let data = discretize::<f64>(&MetricSpec::euclidean(3), &SurfaceFamily::coordinate_sphere(), 1.0, &grid).unwrap();
        assert!(matches!(data.integrate(|_| f64::NAN), Err(Error::NonFiniteIntegrand { node: 0 })));
    }
}
