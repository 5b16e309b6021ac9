//! Scalar abstraction for the geometry engine.
//!
//! Every curvature and surface computation is generic over [`Real`]. The
//! asymptotically flat models run in plain `f64`; the asymptotically
//! hyperbolic models run in double-double ([`Dd`]) because the mass signal
//! there sits roughly `e^{-nρ}` below O(1) terms that cancel in the
//! curvature and the Gauss equation.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst};
use serde::{Deserialize, Serialize};
pub use crate::dd::Dd;

pub trait Real:
    Float
    + FloatConst
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn lit(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for Dd {
    #[inline]
    fn lit(x: f64) -> Self {
        Dd::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
}

/// Working precision for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    /// f64 for asymptotically flat charts, double-double for the ball model.
    #[default]
    Auto,
    Double,
    DoubleDouble,
}
