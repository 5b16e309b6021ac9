//! Double-double scalar.
//!
//! A thin wrapper over [`TwoFloat`] that keeps its addition, multiplication
//! and square root but replaces division, reciprocal and the exponential
//! family with routines accurate to about `1e-31` relative.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Float, FloatConst, Num, NumCast, One, ToPrimitive, Zero};
use twofloat::TwoFloat;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd(pub TwoFloat);

impl Dd {
    #[inline]
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.0.lo()
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd(<TwoFloat as From<f64>>::from(x))
    }

    /// `exp(r) - 1` for `|r| <= ln2/2048`.
    fn expm1_reduced(r: Dd) -> Dd {
        let mut term = r;
        let mut sum = r;
        for k in 2..=12 {
            term = term * r / Dd::from_f64(k as f64);
            sum += term;
            if term.hi().abs() < 1e-36 {
                break;
            }
        }
        sum
    }
}

impl PartialOrd for Dd {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident) => {
        impl $tr for Dd {
            type Output = Dd;
            #[inline]
            fn $f(self, rhs: Dd) -> Dd {
                Dd($tr::$f(self.0, rhs.0))
            }
        }
        impl $atr for Dd {
            #[inline]
            fn $af(&mut self, rhs: Dd) {
                *self = $tr::$f(*self, rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);
binop!(Rem, rem, RemAssign, rem_assign);

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        let b = rhs.0;
        let q1 = self.0.hi() / b.hi();
        if !q1.is_finite() || q1 == 0.0 {
            return Dd(<TwoFloat as From<f64>>::from(q1));
        }
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        Dd(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl DivAssign for Dd {
    #[inline]
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd(<TwoFloat as From<f64>>::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd(<TwoFloat as From<f64>>::from(1.0))
    }
}

impl Num for Dd {
    type FromStrRadixErr = <TwoFloat as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        TwoFloat::from_str_radix(s, radix).map(Dd)
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi() + self.lo())
    }
}

impl NumCast for Dd {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        <TwoFloat as NumCast>::from(n).map(Dd)
    }
}

macro_rules! delegate_const {
    ($($f:ident),*) => {
        $(
            #[inline]
            fn $f() -> Self {
                Dd(<TwoFloat as Float>::$f())
            }
        )*
    };
}

macro_rules! delegate_unary {
    ($($f:ident),*) => {
        $(
            #[inline]
            fn $f(self) -> Self {
                Dd(Float::$f(self.0))
            }
        )*
    };
}

macro_rules! delegate_pred {
    ($($f:ident),*) => {
        $(
            #[inline]
            fn $f(self) -> bool {
                Float::$f(self.0)
            }
        )*
    };
}

impl Float for Dd {
    delegate_const!(infinity, neg_infinity, nan, neg_zero, min_value, min_positive_value, epsilon, max_value);
    delegate_unary!(floor, ceil, round, trunc, fract, abs, signum, sqrt, cbrt, sin, cos, tan, asin, acos, atan, to_degrees, to_radians);
    delegate_pred!(is_nan, is_infinite, is_finite, is_normal, is_sign_positive, is_sign_negative);

    fn classify(self) -> FpCategory {
        self.0.classify()
    }

    fn integer_decode(self) -> (u64, i16, i8) {
        Float::integer_decode(self.0)
    }

    fn min(self, other: Self) -> Self {
        if other < self { other } else { self }
    }

    fn max(self, other: Self) -> Self {
        if other > self { other } else { self }
    }

    fn recip(self) -> Self {
        Dd::one() / self
    }

    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        if n < 0 { acc.recip() } else { acc }
    }

    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }

    fn powf(self, n: Self) -> Self {
        (n * self.ln()).exp()
    }

    fn exp(self) -> Self {
        let x = self.hi();
        if x > 709.0 {
            return Dd::infinity();
        }
        if x < -745.0 {
            return Dd::zero();
        }
        let ln2 = Dd::LN_2();
        let k = (x / std::f64::consts::LN_2).round();
        let r = (self - ln2 * Dd::from_f64(k)) / Dd::from_f64(2048.0);
        let mut e = Dd::expm1_reduced(r);
        for _ in 0..11 {
            e = e * (e + Dd::from_f64(2.0));
        }
        Dd((e + Dd::one()).0 * 2f64.powi(k as i32))
    }

    fn exp2(self) -> Self {
        (self * Dd::LN_2()).exp()
    }

    fn ln(self) -> Self {
        let x = self.hi();
        if x.is_nan() || x < 0.0 {
            return Dd::nan();
        }
        if x == 0.0 {
            return Dd::neg_infinity();
        }
        if x.is_infinite() {
            return self;
        }
        // Newton on exp(y) = self from the f64 logarithm; two steps suffice.
        let mut y = Dd::from_f64(x.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::one();
        }
        y
    }

    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }

    fn log2(self) -> Self {
        self.ln() / Dd::LN_2()
    }

    fn log10(self) -> Self {
        self.ln() / Dd::LN_10()
    }

    fn abs_sub(self, other: Self) -> Self {
        if self > other { self - other } else { Dd::zero() }
    }

    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }

    fn atan2(self, other: Self) -> Self {
        Dd(self.0.atan2(other.0))
    }

    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }

    fn exp_m1(self) -> Self {
        if self.hi().abs() < 1e-3 {
            let mut term = self;
            let mut sum = self;
            for k in 2..=14 {
                term = term * self / Dd::from_f64(k as f64);
                sum += term;
            }
            sum
        } else {
            self.exp() - Dd::one()
        }
    }

    fn ln_1p(self) -> Self {
        if self.hi().abs() < 1e-3 {
            // Newton on exp_m1(y) = self.
            let mut y = Dd::from_f64(self.hi().ln_1p());
            for _ in 0..2 {
                let e = y.exp_m1();
                y = y - (e - self) / (e + Dd::one());
            }
            y
        } else {
            (Dd::one() + self).ln()
        }
    }

    fn sinh(self) -> Self {
        if self.hi().abs() < 0.5 {
            let e = self.exp_m1();
            (e + e / (e + Dd::one())) * Dd::from_f64(0.5)
        } else {
            let e = self.exp();
            (e - e.recip()) * Dd::from_f64(0.5)
        }
    }

    fn cosh(self) -> Self {
        let e = self.exp();
        (e + e.recip()) * Dd::from_f64(0.5)
    }

    fn tanh(self) -> Self {
        let x = self.hi();
        if x.abs() > 40.0 {
            return Dd::from_f64(x.signum()) - Dd::from_f64(2.0 * x.signum()) * (Dd::from_f64(-2.0 * x.abs())).exp();
        }
        let e = (self + self).exp_m1();
        e / (e + Dd::from_f64(2.0))
    }

    fn asinh(self) -> Self {
        let a = self.abs();
        let r = if a.hi() < 0.5 {
            let a2 = a * a;
            (a + a2 / (Dd::one() + (Dd::one() + a2).sqrt())).ln_1p()
        } else {
            (a + (a * a + Dd::one()).sqrt()).ln()
        };
        if self.hi() < 0.0 { -r } else { r }
    }

    fn acosh(self) -> Self {
        (self + (self * self - Dd::one()).sqrt()).ln()
    }

    fn atanh(self) -> Self {
        let a = self.abs();
        let r = ((a + a) / (Dd::one() - a)).ln_1p() * Dd::from_f64(0.5);
        if self.hi() < 0.0 { -r } else { r }
    }
}

macro_rules! delegate_float_const {
    ($($f:ident),*) => {
        $(
            #[inline]
            fn $f() -> Self {
                Dd(<TwoFloat as FloatConst>::$f())
            }
        )*
    };
}

impl FloatConst for Dd {
    delegate_float_const!(
        E, FRAC_1_PI, FRAC_1_SQRT_2, FRAC_2_PI, FRAC_2_SQRT_PI, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, LN_10, LN_2,
        LOG10_E, LOG2_E, PI, SQRT_2
    );
}
