//! Christoffel symbols, Riemann/Ricci/scalar curvature and the modified
//! Einstein tensor `G_λ = Ric − ½[S − λ(n−1)(n−2)] g`, all from a
//! [`MetricJet`] in coordinates.
//!
//! Index conventions: `gamma[k][i][j] = Γᵏ_ij`, and
//! `riem[i][j][k][l] = ⟨R(∂_i, ∂_j)∂_l, ∂_k⟩` with
//! `R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`, so `R_ijij` is the sectional
//! curvature times `g_ii g_jj − g_ij²` and `Ric_jk = g^{il} R_ijlk`.

use crate::error::{Error, Result};
use crate::linalg::inverse_spd;
use crate::metric::{zero_mat, zero_t3, zero_t4, Mat, MetricJet, Tensor3, Tensor4};
use crate::real::Real;

/// Curvature data at one point.
#[derive(Debug, Clone)]
pub struct CurvaturePoint<T: Real> {
    pub n: usize,
    pub g: Mat<T>,
    pub ginv: Mat<T>,
    pub gamma: Tensor3<T>,
    pub riem: Tensor4<T>,
    pub ric: Mat<T>,
    pub scalar: T,
}

/// `Γᵏ_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)` with its lowered form.
fn christoffel_parts<T: Real>(jet: &MetricJet<T>, ginv: &Mat<T>) -> (Tensor3<T>, Tensor3<T>) {
    let n = jet.n;
    let half = T::lit(0.5);
    let mut first = zero_t3::<T>();
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                first[l][i][j] = half * (jet.dg[i][j][l] + jet.dg[j][i][l] - jet.dg[l][i][j]);
            }
        }
    }
    let mut second = zero_t3::<T>();
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = T::zero();
                for l in 0..n {
                    s += ginv[k][l] * first[l][i][j];
                }
                second[k][i][j] = s;
                second[k][j][i] = s;
            }
        }
    }
    (first, second)
}

pub fn christoffel<T: Real>(jet: &MetricJet<T>) -> Result<Tensor3<T>> {
    let ginv = inverse_spd(jet.n, &jet.g)?;
    Ok(christoffel_parts(jet, &ginv).1)
}

impl<T: Real> CurvaturePoint<T> {
    pub fn new(jet: &MetricJet<T>) -> Result<Self> {
        let n = jet.n;
        let ginv = inverse_spd(n, &jet.g)?;
        let (first, gamma) = christoffel_parts(jet, &ginv);
        let half = T::lit(0.5);
        // ∂_i Γ_{k j l}
        let d_first = |i: usize, k: usize, j: usize, l: usize| -> T {
            half * (jet.ddg[i][j][l][k] + jet.ddg[i][l][j][k] - jet.ddg[i][k][j][l])
        };
        let mut riem = zero_t4::<T>();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        let mut v = d_first(i, k, j, l) - d_first(j, k, i, l);
                        for b in 0..n {
                            v -= jet.dg[i][k][b] * gamma[b][j][l];
                            v += jet.dg[j][k][b] * gamma[b][i][l];
                            v += first[k][i][b] * gamma[b][j][l];
                            v -= first[k][j][b] * gamma[b][i][l];
                        }
                        riem[i][j][k][l] = v;
                    }
                }
            }
        }
        let mut ric = zero_mat::<T>();
        for j in 0..n {
            for k in 0..n {
                let mut s = T::zero();
                for i in 0..n {
                    for l in 0..n {
                        s += ginv[i][l] * riem[i][j][l][k];
                    }
                }
                ric[j][k] = s;
            }
        }
        // symmetrize away round-off
        for j in 0..n {
            for k in (j + 1)..n {
                let avg = half * (ric[j][k] + ric[k][j]);
                ric[j][k] = avg;
                ric[k][j] = avg;
            }
        }
        let mut scalar = T::zero();
        for j in 0..n {
            for k in 0..n {
                scalar += ginv[j][k] * ric[j][k];
            }
        }
        Ok(Self {
            n,
            g: jet.g,
            ginv,
            gamma,
            riem,
            ric,
            scalar,
        })
    }

    /// `G_λ = Ric − ½[S − λ(n−1)(n−2)] g`.
    pub fn g_lambda(&self, lambda: Lambda) -> Mat<T> {
        let n = self.n;
        let c = T::lit(lambda.value() * ((n - 1) * (n - 2)) as f64);
        let f = T::lit(0.5) * (self.scalar - c);
        let mut out = zero_mat::<T>();
        for i in 0..n {
            for j in 0..n {
                out[i][j] = self.ric[i][j] - f * self.g[i][j];
            }
        }
        out
    }
}

pub fn riemann<T: Real>(jet: &MetricJet<T>) -> Result<Tensor4<T>> {
    Ok(CurvaturePoint::new(jet)?.riem)
}

pub fn ricci<T: Real>(jet: &MetricJet<T>) -> Result<Mat<T>> {
    Ok(CurvaturePoint::new(jet)?.ric)
}

pub fn scalar<T: Real>(jet: &MetricJet<T>) -> Result<T> {
    Ok(CurvaturePoint::new(jet)?.scalar)
}

pub fn g_lambda<T: Real>(jet: &MetricJet<T>, lambda: Lambda) -> Result<Mat<T>> {
    Ok(CurvaturePoint::new(jet)?.g_lambda(lambda))
}

/// The two background curvatures: flat (`λ = 0`) and hyperbolic (`λ = −1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lambda {
    Flat,
    Hyperbolic,
}

impl Lambda {
    pub fn value(self) -> f64 {
        match self {
            Lambda::Flat => 0.0,
            Lambda::Hyperbolic => -1.0,
        }
    }
}

/// Normalizing constants `(b_n, c_n, ω_{n−1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub b: f64,
    pub c: f64,
    pub omega: f64,
}

/// Volume of the unit sphere `S^k ⊂ ℝ^{k+1}`.
pub fn sphere_volume(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_volume(k - 2),
    }
}

pub fn constants(n: usize) -> Result<Constants> {
    if n < 3 {
        return Err(Error::BadDimension(n));
    }
    let omega = sphere_volume(n - 1);
    let nf = n as f64;
    Ok(Constants {
        b: 1.0 / (2.0 * (nf - 1.0) * omega),
        c: 1.0 / ((nf - 1.0) * (nf - 2.0) * omega),
        omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{eval_jet, MetricSpec};
    use std::f64::consts::PI;

    #[test]
    fn constants_match_closed_forms() {
        let c3 = constants(3).unwrap();
        assert!((c3.omega - 4.0 * PI).abs() < 1e-14);
        assert!((c3.b - 1.0 / (16.0 * PI)).abs() < 1e-16);
        assert!((c3.c - 1.0 / (8.0 * PI)).abs() < 1e-16);
        let c4 = constants(4).unwrap();
        assert!((c4.omega - 2.0 * PI * PI).abs() < 1e-13);
        assert!((c4.b - 1.0 / (12.0 * PI * PI)).abs() < 1e-16);
        assert!((c4.c - 1.0 / (12.0 * PI * PI)).abs() < 1e-16);
        for n in 3..=6 {
            let k = constants(n).unwrap();
            assert!((k.c - 2.0 * k.b / (n as f64 - 2.0)).abs() < 1e-16);
        }
        assert!(constants(2).is_err());
    }

    #[test]
    fn flat_space_has_no_curvature() {
        let jet = eval_jet::<f64>(&MetricSpec::euclidean(3), &[1.0, 2.0, 2.0]).unwrap();
        let cp = CurvaturePoint::new(&jet).unwrap();
        assert_eq!(cp.scalar, 0.0);
        assert!(cp.gamma.iter().flatten().flatten().all(|&x| x == 0.0));
        let g = cp.g_lambda(Lambda::Flat);
        assert!(g.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn ball_origin_christoffels_vanish() {
        let jet = eval_jet::<f64>(&MetricSpec::hyperbolic_ball(3), &[0.0; 3]).unwrap();
        let gamma = christoffel(&jet).unwrap();
        assert!(gamma.iter().flatten().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn hyperbolic_sectional_curvature() {
        for n in 3..=5 {
            let mut p = vec![0.0; n];
            p[0] = 0.3;
            p[n - 1] = -0.4;
            let jet = eval_jet::<f64>(&MetricSpec::hyperbolic_ball(n), &p).unwrap();
            let cp = CurvaturePoint::new(&jet).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let k = cp.riem[i][j][i][j] / (cp.g[i][i] * cp.g[j][j] - cp.g[i][j] * cp.g[i][j]);
                    assert!((k + 1.0).abs() < 1e-12, "n={n} K={k}");
                }
            }
            let nf = n as f64;
            assert!((cp.scalar + nf * (nf - 1.0)).abs() < 1e-11);
            let g = cp.g_lambda(Lambda::Hyperbolic);
            assert!(g.iter().flatten().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn schwarzschild_is_scalar_flat_and_g0_is_ricci() {
        let jet = eval_jet::<f64>(&MetricSpec::schwarzschild(3, 1.0), &[5.0, 0.0, 0.0]).unwrap();
        let cp = CurvaturePoint::new(&jet).unwrap();
        assert!(cp.scalar.abs() < 1e-13);
        // Radial/tangential Ricci of the isotropic slice: Ric(e_r,e_r) = −2m/R³,
        // Ric(e_t,e_t) = m/R³ in an orthonormal frame, R the areal radius.
        let u: f64 = 1.0 + 1.0 / 10.0;
        let areal = u * u * 5.0;
        let psi = u.powi(4);
        let rr = cp.ric[0][0] / psi;
        let tt = cp.ric[1][1] / psi;
        assert!((rr + 2.0 / areal.powi(3)).abs() < 1e-14, "{rr}");
        assert!((tt - 1.0 / areal.powi(3)).abs() < 1e-14, "{tt}");
        let g0 = cp.g_lambda(Lambda::Flat);
        assert!((g0[0][0] - cp.ric[0][0]).abs() < 1e-14);
    }
}
