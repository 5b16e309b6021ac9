//! Numerical evaluation of total-mass and quasi-local-mass integrals on
//! asymptotically flat and asymptotically hyperbolic model manifolds.
//!
//! The pipeline runs bottom-up:
//!
//! - [`metric`]: catalog of analytic metrics with exact second-order jets.
//! - [`curvature`]: Christoffel symbols, Riemann, Ricci, scalar curvature
//!   and `G_λ`.
//! - [`quadrature`] and [`surface`]: discretized hypersurface families with
//!   full extrinsic and intrinsic shape data at each node.
//! - [`embed`]: round reference embeddings into `ℝⁿ` and `ℍⁿ`.
//! - [`mass`]: every mass estimator, flux and quasi-local.
//! - [`analysis`]: radius sweeps, decay-rate fits, Richardson extrapolation.

pub mod analysis;
pub mod curvature;
pub mod dd;
pub mod embed;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod mass;
pub mod metric;
pub mod quadrature;
pub mod real;
pub mod sum;
pub mod surface;

pub use error::{Error, Result};
pub use metric::{Chart, MetricSpec};
pub use real::{Dd, Precision, Real};
