//! Product quadrature on `S^{n−1}` in hyperspherical angles.
//!
//! Angles `(a₁, …, a_{n−2}, ψ)` with `θ_n = cos a₁`,
//! `θ_{n−1} = sin a₁ cos a₂`, …, `θ₁ = ∏ sin a_j · cos ψ`,
//! `θ₂ = ∏ sin a_j · sin ψ`. The polar angle `a_k` carries the density
//! `sin^{n−1−k} a_k`: odd powers use Gauss–Legendre in `cos a_k`, even
//! powers use Gauss–Chebyshev of the second kind, with the remaining
//! density folded into the weight. The azimuth uses the periodic trapezoid
//! rule.

use serde::{Deserialize, Serialize};

use crate::curvature::sphere_volume;
use crate::error::{Error, Result};

/// One quadrature node: `(cos, sin)` of each angle and its weight with
/// respect to the round area element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadNode {
    pub cs: Vec<(f64, f64)>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub n: usize,
    pub resolution: usize,
    pub nodes: Vec<QuadNode>,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// One-dimensional rule for a polar angle with density `sin^p`: Gauss–Legendre
/// in `cos a` for odd `p`, Gauss–Chebyshev of the second kind for even `p`.
/// Both are exact for polynomial integrands on the sphere.
fn polar_rule(m: usize, p: usize) -> Vec<((f64, f64), f64)> {
    if p % 2 == 1 {
        let (x, w) = gauss_legendre(m);
        x.iter()
            .zip(&w)
            .map(|(&t, &wt)| {
                let s = (1.0 - t * t).sqrt();
                ((t, s), wt * (1.0 - t * t).powi(((p - 1) / 2) as i32))
            })
            .collect()
    } else {
        let h = std::f64::consts::PI / (m as f64 + 1.0);
        (1..=m)
            .rev()
            .map(|k| {
                let (s, c) = (k as f64 * h).sin_cos();
                ((c, s), h * s.powi(p as i32))
            })
            .collect()
    }
}

/// Product rule on `S^{n−1}`: `resolution` nodes per polar angle and
/// `2·resolution` azimuthal nodes.
pub fn build_grid(n: usize, resolution: usize) -> Result<QuadratureGrid> {
    if !(3..=6).contains(&n) {
        return Err(Error::BadDimension(n));
    }
    if resolution < 8 {
        return Err(Error::BadResolution(resolution));
    }
    let naz = 2 * resolution;
    let azimuth: Vec<((f64, f64), f64)> = (0..naz)
        .map(|j| {
            let a = 2.0 * std::f64::consts::PI * j as f64 / naz as f64;
            let (s, c) = a.sin_cos();
            ((c, s), 2.0 * std::f64::consts::PI / naz as f64)
        })
        .collect();
    let mut rules: Vec<Vec<((f64, f64), f64)>> = (1..=n - 2).map(|k| polar_rule(resolution, n - 1 - k)).collect();
    rules.push(azimuth);
    let mut nodes = vec![QuadNode {
        cs: Vec::with_capacity(n - 1),
        weight: 1.0,
    }];
    for rule in &rules {
        let mut next = Vec::with_capacity(nodes.len() * rule.len());
        for node in &nodes {
            for &(cs, w) in rule {
                let mut c = node.cs.clone();
                c.push(cs);
                next.push(QuadNode {
                    cs: c,
                    weight: node.weight * w,
                });
            }
        }
        nodes = next;
    }
    Ok(QuadratureGrid { n, resolution, nodes })
}

impl QuadratureGrid {
    pub fn total_weight(&self) -> f64 {
        crate::sum::kahan_sum(self.nodes.iter().map(|q| q.weight))
    }

    pub fn omega(&self) -> f64 {
        sphere_volume(self.n - 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Unit vector of a node, in `f64`.
pub fn unit_vector(n: usize, node: &QuadNode) -> Vec<f64> {
    let mut theta = vec![0.0; n];
    let mut prod = 1.0;
    for k in 0..n - 2 {
        let (c, s) = node.cs[k];
        theta[n - 1 - k] = prod * c;
        prod *= s;
    }
    let (c, s) = node.cs[n - 2];
    theta[0] = prod * c;
    theta[1] = prod * s;
    theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let integral: f64 = x.iter().zip(&w).map(|(t, wt)| wt * t.powi(14)).sum();
        assert!((integral - 2.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_sphere_volume() {
        let g = build_grid(3, 16).unwrap();
        assert_eq!(g.len(), 16 * 32);
        assert!((g.total_weight() - 4.0 * PI).abs() < 1e-13);
        for n in 4..=6 {
            let g = build_grid(n, 10).unwrap();
            assert!((g.total_weight() - g.omega()).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn odd_moments_vanish() {
        let g = build_grid(3, 16).unwrap();
        for i in 0..3 {
            let s: f64 = crate::sum::kahan_sum(g.nodes.iter().map(|q| q.weight * unit_vector(3, q)[i]));
            assert!(s.abs() < 1e-13, "component {i}: {s}");
        }
    }

    #[test]
    fn second_moment_on_s3() {
        let g = build_grid(4, 12).unwrap();
        let s = crate::sum::kahan_sum(g.nodes.iter().map(|q| q.weight * unit_vector(4, q)[0].powi(2)));
        assert!((s - PI * PI / 2.0).abs() < 1e-12, "{s}");
    }

    #[test]
    fn nodes_are_unit_vectors() {
        let g = build_grid(5, 8).unwrap();
        for q in &g.nodes {
            let t = unit_vector(5, q);
            let r: f64 = t.iter().map(|x| x * x).sum();
            assert!((r - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_grid(2, 16), Err(Error::BadDimension(2))));
        assert!(matches!(build_grid(3, 4), Err(Error::BadResolution(4))));
    }
}
