//! Dense kernels for the small (n ≤ 6) symmetric matrices that appear at a
//! single point: Cholesky, SPD inverse, cyclic Jacobi eigenvalues.

use crate::error::{Error, Result};
use crate::metric::{zero_mat, Mat};
use crate::real::Real;

pub const PIVOT_MIN: f64 = 1e-13;

/// Lower-triangular Cholesky factor of the leading `n×n` block.
pub fn cholesky<T: Real>(n: usize, a: &Mat<T>) -> Result<Mat<T>> {
    let mut l = zero_mat::<T>();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d.to_f64() > PIVOT_MIN) {
            return Err(Error::SingularMetric { pivot: d.to_f64() });
        }
        let djj = d.sqrt();
        l[j][j] = djj;
        for i in (j + 1)..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
pub fn invert_lower<T: Real>(n: usize, l: &Mat<T>) -> Mat<T> {
    let mut inv = zero_mat::<T>();
    for i in 0..n {
        inv[i][i] = l[i][i].recip();
        for j in 0..i {
            let mut s = T::zero();
            for k in j..i {
                s += l[i][k] * inv[k][j];
            }
            inv[i][j] = -s / l[i][i];
        }
    }
    inv
}

pub fn inverse_spd<T: Real>(n: usize, a: &Mat<T>) -> Result<Mat<T>> {
    let li = invert_lower(n, &cholesky(n, a)?);
    let mut out = zero_mat::<T>();
    for i in 0..n {
        for j in 0..=i {
            let mut s = T::zero();
            for k in i.max(j)..n {
                s += li[k][i] * li[k][j];
            }
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    Ok(out)
}

pub fn determinant_spd<T: Real>(n: usize, a: &Mat<T>) -> Result<T> {
    let l = cholesky(n, a)?;
    Ok((0..n).fold(T::one(), |acc, i| acc * l[i][i] * l[i][i]))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real>(n: usize, a: &Mat<T>) -> Vec<T> {
    let mut m = *a;
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut scale = T::zero();
        for i in 0..n {
            scale += m[i][i] * m[i][i];
            for j in 0..n {
                if i != j {
                    off += m[i][j] * m[i][j];
                }
            }
        }
        if off <= eps * eps * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() <= T::lit(1e-40) * (m[p][p].abs() + m[q][q].abs()) {
                    m[p][q] = T::zero();
                    m[q][p] = T::zero();
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (T::lit(2.0) * m[p][q]);
                let sign = if theta < T::zero() { -T::one() } else { T::one() };
                let t = if theta.abs() > T::lit(1e100) {
                    (T::lit(2.0) * theta).recip()
                } else {
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Generalized eigenvalues of `a` against the SPD matrix `b`
/// (`a v = λ b v`), via `L⁻¹ a L⁻ᵀ` with `b = L Lᵀ`.
pub fn generalized_eigenvalues<T: Real>(n: usize, a: &Mat<T>, b: &Mat<T>) -> Result<Vec<T>> {
    let li = invert_lower(n, &cholesky(n, b)?);
    let mut tmp = zero_mat::<T>();
    for i in 0..n {
        for j in 0..n {
            let mut s = T::zero();
            for k in 0..=i {
                s += li[i][k] * a[k][j];
            }
            tmp[i][j] = s;
        }
    }
    let mut c = zero_mat::<T>();
    for i in 0..n {
        for j in 0..=i {
            let mut s = T::zero();
            for k in 0..=j {
                s += tmp[i][k] * li[j][k];
            }
            c[i][j] = s;
            c[j][i] = s;
        }
    }
    Ok(symmetric_eigenvalues(n, &c))
}
