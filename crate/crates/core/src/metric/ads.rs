//! Radial profile of the AdS-Schwarzschild slice in geodesic normalization.
//!
//! The slice `dr²/(1 + r² − 2m r^{2−n}) + r² h₀` is rewritten as
//! `ds² + r(s)² h₀`, with the additive constant in `s` fixed so that
//! `r(s) − sinh s → 0`:
//!
//! ```text
//! s(r) = asinh r − ∫_r^∞ [ (1 + t² − 2m t^{2−n})^{−1/2} − (1 + t²)^{−1/2} ] dt
//! ```

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-12;
const MAX_DEPTH: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub r: f64,
    /// `r − sinh s`, resolved to the tail tolerance rather than to the
    /// rounding of `r`.
    pub excess: f64,
    pub dr: f64,
    pub ddr: f64,
}

fn lapse_sq(m: f64, n: usize, r: f64) -> f64 {
    1.0 + r * r - 2.0 * m * r.powi(2 - n as i32)
}

/// Outermost zero of `1 + r² − 2m r^{2−n}`; zero when `m = 0`.
pub fn horizon_radius(m: f64, n: usize) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while lapse_sq(m, n, hi) <= 0.0 {
        hi *= 2.0;
    }
    // f is increasing in r, bisect to full precision
    lo = lo.max(hi * 1e-300);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if lapse_sq(m, n, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = h * XGK[k];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (val, err) = gk15(f, a, b);
    if !val.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    if err <= tol || (b - a).abs() <= f64::EPSILON * a.abs().max(b.abs()) {
        return Ok(val);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailure(format!(
            "subdivision limit on [{a}, {b}], error estimate {err:e}"
        )));
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive(f, a, mid, 0.5 * tol, depth + 1)? + adaptive(f, mid, b, 0.5 * tol, depth + 1)?)
}

/// `(1 + t² − 2m t^{2−n})^{−1/2} − (1 + t²)^{−1/2}` at `t = r_h + u²`.
///
/// The lapse is evaluated as `u² q(t)` with
/// `q = t + r_h + 2m Σ_{j<n−2} t^j r_h^{n−3−j} / (t r_h)^{n−2}`, which is
/// free of cancellation near the horizon; the difference of inverse roots
/// is rearranged to avoid cancellation for large `t`.
fn tail_integrand(m: f64, n: usize, r_h: f64, u: f64) -> f64 {
    let t = r_h + u * u;
    let k = n as i32 - 2;
    let mut poly = 0.0;
    for j in 0..k {
        poly += t.powi(j) * r_h.powi(k - 1 - j);
    }
    let q = t + r_h + 2.0 * m * poly / (t * r_h).powi(k);
    let f = u * u * q;
    let f0 = 1.0 + t * t;
    let diff = 2.0 * m * t.powi(2 - n as i32);
    let (sf, sf0) = (f.sqrt(), f0.sqrt());
    diff / (sf * sf0 * (sf + sf0))
}

/// The tail integral `asinh r − s(r)`, integrated in `u = sqrt(t − r_h)` which
/// removes the inverse-square-root singularity at the horizon.
fn tail(m: f64, n: usize, r: f64, r_h: f64) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    let u0 = (r - r_h).max(0.0).sqrt();
    let scale = u0 + 1.0;
    let g = |x: f64| {
        let w = x / (1.0 - x);
        let u = u0 + scale * w;
        let du = scale / ((1.0 - x) * (1.0 - x));
        2.0 * u * tail_integrand(m, n, r_h, u) * du
    };
    // coarse pass fixes the absolute target
    let (rough, _) = gk15(&g, 0.0, 1.0);
    let tol = (REL_TOL * rough.abs()).max(1e-300);
    adaptive(&g, 0.0, 1.0, tol, 0)
}

/// Geodesic coordinate `s` of the areal radius `r`.
pub fn geodesic_coordinate(m: f64, n: usize, r: f64) -> Result<f64> {
    let r_h = horizon_radius(m, n);
    if r < r_h {
        return Err(Error::HorizonViolation(format!("r = {r} < r_h = {r_h}")));
    }
    Ok(r.asinh() - tail(m, n, r, r_h)?)
}

/// Areal radius `r(s)` of the AdS-Schwarzschild slice with its first two
/// derivatives in the geodesic coordinate.
pub fn ads_radial_profile(m: f64, n: usize, s: f64) -> Result<RadialProfile> {
    if n < 3 {
        return Err(Error::BadDimension(n));
    }
    if !(m >= 0.0) {
        return Err(Error::InvalidParameter(format!("mass m = {m} must be >= 0")));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::OutOfDomain(format!("geodesic radius s = {s}")));
    }
    let y = s.sinh();
    let derivs = |r: f64, excess: f64| RadialProfile {
        r,
        excess,
        dr: lapse_sq(m, n, r).max(0.0).sqrt(),
        ddr: r + (n as f64 - 2.0) * m * r.powi(1 - n as i32),
    };
    if m == 0.0 {
        return Ok(derivs(y, 0.0));
    }
    let r_h = horizon_radius(m, n);
    let s_h = r_h.asinh() - tail(m, n, r_h, r_h)?;
    if s <= s_h {
        return Err(Error::HorizonViolation(format!(
            "s = {s} <= horizon s_h = {s_h}"
        )));
    }
    // s(r) < asinh r, so sinh s is a lower bracket
    let s_of = |r: f64| -> Result<f64> { Ok(r.asinh() - tail(m, n, r, r_h)?) };
    let mut lo = s.sinh().max(r_h);
    let mut hi = lo + 1.0;
    while s_of(hi)? < s {
        hi = lo + 2.0 * (hi - lo);
    }
    let mut r = lo;
    for _ in 0..200 {
        let resid = s_of(r)? - s;
        if resid > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let step = resid * lapse_sq(m, n, r).max(0.0).sqrt();
        let mut next = r - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - r).abs() <= 2.0 * f64::EPSILON * r
            || (hi - lo) <= 4.0 * f64::EPSILON * hi;
        r = next;
        if done {
            return Ok(derivs(r, refine_excess(m, n, r_h, y, r - y)?));
        }
    }
    Err(Error::QuadratureFailure(format!(
        "profile inversion did not converge at s = {s}"
    )))
}

/// Newton on `asinh(y + δ) − asinh y = tail(y + δ)` with the left side in
/// cancellation-free form.
fn refine_excess(m: f64, n: usize, r_h: f64, y: f64, mut delta: f64) -> Result<f64> {
    for _ in 0..4 {
        let x = y + delta;
        let den = x * (1.0 + y * y).sqrt() + y * (1.0 + x * x).sqrt();
        let f = (delta * (2.0 * y + delta) / den).asinh() - tail(m, n, x, r_h)?;
        let step = f * lapse_sq(m, n, x).max(0.0).sqrt();
        delta -= step;
        if step.abs() <= 1e-15 * delta.abs() {
            break;
        }
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn massless_profile_is_hyperbolic() {
        let p = ads_radial_profile(0.0, 3, 2.0).unwrap();
        assert_eq!(p.r, 2.0_f64.sinh());
        assert!((p.dr - 2.0_f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn massive_profile_deviates_and_decays() {
        let d5 = ads_radial_profile(1.0, 3, 5.0).unwrap().r - 5.0_f64.sinh();
        let d10 = ads_radial_profile(1.0, 3, 10.0).unwrap().r - 10.0_f64.sinh();
        assert!(d10.abs() > 0.0);
        assert!(d10.abs() < d5.abs());
        // leading behaviour r − sinh s ≈ (m/n) sinh^{1−n} s
        let d6 = ads_radial_profile(1.0, 3, 6.0).unwrap().r - 6.0_f64.sinh();
        let lead = 6.0_f64.sinh().powi(-2) / 3.0;
        assert!((d6 / lead - 1.0).abs() < 1e-3, "{}", d6 / lead);
    }

    #[test]
    fn excess_resolves_far_tail() {
        for &s in &[8.0_f64, 12.0, 16.0] {
            let p = ads_radial_profile(1.0, 3, s).unwrap();
            let lead = s.sinh().powi(-2) / 3.0;
            assert!((p.excess / lead - 1.0).abs() < 1e-6, "s={s}: {}", p.excess / lead);
        }
        assert_eq!(ads_radial_profile(0.0, 4, 3.0).unwrap().excess, 0.0);
    }

    #[test]
    fn inversion_round_trips() {
        for &s in &[1.5, 3.0, 7.0] {
            let p = ads_radial_profile(1.0, 3, s).unwrap();
            let back = geodesic_coordinate(1.0, 3, p.r).unwrap();
            assert!((back - s).abs() < 1e-13, "{s} -> {back}");
        }
    }

    #[test]
    fn inside_horizon_rejected() {
        assert!(matches!(
            ads_radial_profile(1.0, 3, 0.05),
            Err(Error::HorizonViolation(_))
        ));
    }

    #[test]
    fn horizon_root() {
        let r = horizon_radius(1.0, 3);
        assert!(lapse_sq(1.0, 3, r).abs() < 1e-12);
    }
}
