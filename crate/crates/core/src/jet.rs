//! Second-order forward-mode jets.
//!
//! A [`Jet`] carries a value together with its exact gradient and Hessian
//! with respect to up to [`MAX_DIM`] independent variables. Catalog metrics
//! are written once as ordinary formulas over jets, and their first and
//! second partial derivatives fall out without finite differencing.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::Real;

pub const MAX_DIM: usize = 6;

#[derive(Debug, Clone, Copy)]
pub struct Jet<T: Real> {
    pub n: usize,
    pub v: T,
    pub d: [T; MAX_DIM],
    pub h: [[T; MAX_DIM]; MAX_DIM],
}

impl<T: Real> Jet<T> {
    pub fn constant(n: usize, v: T) -> Self {
        Self {
            n,
            v,
            d: [T::zero(); MAX_DIM],
            h: [[T::zero(); MAX_DIM]; MAX_DIM],
        }
    }

    /// The independent variable `x_i` evaluated at `v`.
    pub fn var(n: usize, i: usize, v: T) -> Self {
        let mut j = Self::constant(n, v);
        j.d[i] = T::one();
        j
    }

    /// All coordinate variables at `point`.
    pub fn vars(point: &[T]) -> Vec<Self> {
        let n = point.len();
        (0..n).map(|i| Self::var(n, i, point[i])).collect()
    }

    /// Composition with a scalar function given its value and first two
    /// derivatives at `self.v`.
    pub fn chain(&self, f: T, f1: T, f2: T) -> Self {
        let mut out = Self::constant(self.n, f);
        for i in 0..self.n {
            out.d[i] = f1 * self.d[i];
        }
        for i in 0..self.n {
            for j in 0..self.n {
                out.h[i][j] = f1 * self.h[i][j] + f2 * self.d[i] * self.d[j];
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        out.v = out.v * s;
        for i in 0..self.n {
            out.d[i] = out.d[i] * s;
            for j in 0..self.n {
                out.h[i][j] = out.h[i][j] * s;
            }
        }
        out
    }

    pub fn add_const(&self, c: T) -> Self {
        let mut out = *self;
        out.v = out.v + c;
        out
    }

    pub fn recip(&self) -> Self {
        let inv = self.v.recip();
        self.chain(inv, -inv * inv, T::lit(2.0) * inv * inv * inv)
    }

    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let half = T::lit(0.5);
        self.chain(s, half / s, -half * half / (s * self.v))
    }

    pub fn powi(&self, p: i32) -> Self {
        if p == 0 {
            return Self::constant(self.n, T::one());
        }
        let pf = T::lit(p as f64);
        let f = self.v.powi(p);
        let f1 = pf * self.v.powi(p - 1);
        let f2 = pf * (pf - T::one()) * self.v.powi(p - 2);
        self.chain(f, f1, f2)
    }

    pub fn powf(&self, p: T) -> Self {
        let f = self.v.powf(p);
        let f1 = p * f / self.v;
        let f2 = p * (p - T::one()) * f / (self.v * self.v);
        self.chain(f, f1, f2)
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let inv = self.v.recip();
        self.chain(self.v.ln(), inv, -inv * inv)
    }

    pub fn value(&self) -> T {
        self.v
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        out.v = self.v + o.v;
        for i in 0..self.n {
            out.d[i] = self.d[i] + o.d[i];
            for j in 0..self.n {
                out.h[i][j] = self.h[i][j] + o.h[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant(self.n, self.v * o.v);
        for i in 0..self.n {
            out.d[i] = self.d[i] * o.v + self.v * o.d[i];
        }
        for i in 0..self.n {
            for j in 0..self.n {
                out.h[i][j] = self.h[i][j] * o.v
                    + self.v * o.h[i][j]
                    + self.d[i] * o.d[j]
                    + self.d[j] * o.d[i];
            }
        }
        out
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}
