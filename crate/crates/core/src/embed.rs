//! Round reference embeddings into `ℝⁿ` and `ℍⁿ`.
//!
//! Only surfaces whose induced metric is exactly `R²` times the round
//! metric (in the surface parametrization) are embedded; the embedding is
//! then the centered round sphere and its curvature is closed-form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::surface::SurfaceData;

pub const ROUND_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Euclidean,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy)]
pub struct RoundEmbedding<T: Real> {
    pub target: Target,
    /// Area radius of the surface: the Euclidean radius, or `sinh ρ*`.
    pub radius: T,
    /// `cosh ρ*` for hyperbolic targets, 1 otherwise.
    pub cosh_rho: T,
    pub h0: T,
    pub kappa0: T,
    pub roundness_defect: f64,
}

impl<T: Real> RoundEmbedding<T> {
    /// Hyperbolic radius `ρ*` (zero for Euclidean targets).
    pub fn rho_star(&self) -> f64 {
        match self.target {
            Target::Euclidean => 0.0,
            Target::Hyperbolic => self.radius.to_f64().asinh(),
        }
    }

    /// Intrinsic scalar curvature of the embedded round sphere.
    pub fn scalar0(&self, n: usize) -> T {
        T::lit(((n - 1) * (n - 2)) as f64) / (self.radius * self.radius)
    }

    /// `Σ_{α<β} κ⁰_α κ⁰_β`.
    pub fn sigma2_0(&self, n: usize) -> T {
        T::lit(((n - 1) * (n - 2)) as f64 / 2.0) * self.kappa0 * self.kappa0
    }

    /// Position on the hyperboloid of the image of the node with sphere
    /// parameter `theta`.
    pub fn position(&self, theta: &[T]) -> Vec<T> {
        let mut x = Vec::with_capacity(theta.len() + 1);
        x.push(self.cosh_rho);
        x.extend(theta.iter().map(|&t| self.radius * t));
        x
    }
}

/// `(cosh ρ*, sinh ρ* θ) ∈ ℝ^{n,1}`.
pub fn hyperboloid_position<T: Real>(theta: &[T], rho_star: T) -> Vec<T> {
    let (c, s) = (rho_star.cosh(), rho_star.sinh());
    let mut x = Vec::with_capacity(theta.len() + 1);
    x.push(c);
    x.extend(theta.iter().map(|&t| s * t));
    x
}

/// Max over nodes of `|σ_ab − R² h₀_ab| / R²`, `R` the area radius.
pub fn roundness_defect<T: Real>(data: &SurfaceData<T>) -> f64 {
    let m = data.n - 1;
    let r2 = data.area_radius * data.area_radius;
    let mut defect = 0.0_f64;
    for node in &data.nodes {
        for a in 0..m {
            for b in 0..m {
                let d = ((node.sigma[a][b] - r2 * node.round[a][b]) / r2).abs().to_f64();
                defect = defect.max(d);
            }
        }
    }
    defect
}

pub fn round_embed<T: Real>(data: &SurfaceData<T>, target: Target) -> Result<RoundEmbedding<T>> {
    let defect = roundness_defect(data);
    if !(defect <= ROUND_TOL) {
        return Err(Error::NotRound {
            defect,
            tol: ROUND_TOL,
        });
    }
    let radius = data.area_radius;
    let k = T::lit((data.n - 1) as f64);
    let (cosh_rho, kappa0) = match target {
        Target::Euclidean => (T::one(), radius.recip()),
        Target::Hyperbolic => {
            let c = (T::one() + radius * radius).sqrt();
            (c, c / radius)
        }
    };
    Ok(RoundEmbedding {
        target,
        radius,
        cosh_rho,
        h0: k * kappa0,
        kappa0,
        roundness_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{ads_radial_profile, MetricSpec};
    use crate::quadrature::build_grid;
    use crate::surface::{discretize, SurfaceFamily};

    #[test]
    fn schwarzschild_sphere_embeds_in_euclidean_space() {
        let grid = build_grid(3, 16).unwrap();
        let data = discretize::<f64>(&MetricSpec::schwarzschild(3, 1.0), &SurfaceFamily::coordinate_sphere(), 10.0, &grid).unwrap();
        let emb = round_embed(&data, Target::Euclidean).unwrap();
        let r = 1.05_f64.powi(2) * 10.0;
        assert!((emb.radius - r).abs() < 1e-12);
        assert!((emb.h0 - 2.0 / r).abs() < 1e-14);
        for node in &data.nodes {
            assert!((node.srho - emb.scalar0(3)).abs() < 1e-10);
        }
    }

    #[test]
    fn ads_sphere_embeds_in_hyperbolic_space() {
        let grid = build_grid(3, 12).unwrap();
        let data = discretize::<f64>(&MetricSpec::ads_schwarzschild(3, 1.0), &SurfaceFamily::geodesic_sphere(), 5.0, &grid).unwrap();
        let emb = round_embed(&data, Target::Hyperbolic).unwrap();
        let r = ads_radial_profile(1.0, 3, 5.0).unwrap().r;
        assert!((emb.radius / r - 1.0).abs() < 1e-12);
        let coth = 1.0 / emb.rho_star().tanh();
        assert!((emb.h0 - 2.0 * coth).abs() < 1e-12);
        for node in &data.nodes {
            assert!((node.srho / emb.scalar0(3) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn perturbed_sphere_is_not_round() {
        let grid = build_grid(3, 12).unwrap();
        let data = discretize::<f64>(&MetricSpec::schwarzschild(3, 1.0), &SurfaceFamily::perturbed_sphere(0.5), 20.0, &grid).unwrap();
        assert!(matches!(round_embed(&data, Target::Euclidean), Err(Error::NotRound { .. })));
    }

    #[test]
    fn hyperboloid_positions() {
        let o = hyperboloid_position(&[0.6, 0.8, 0.0], 0.0);
        assert_eq!(o, vec![1.0, 0.0, 0.0, 0.0]);
        let x = hyperboloid_position(&[1.0, 0.0, 0.0], 2.0_f64);
        assert_eq!(x, vec![2.0_f64.cosh(), 2.0_f64.sinh(), 0.0, 0.0]);
        let y = hyperboloid_position(&[0.36, 0.48, 0.8], 3.0_f64);
        let q = y[0] * y[0] - y[1..].iter().map(|v| v * v).sum::<f64>();
        assert!((q - 1.0).abs() < 1e-12);
    }
}
