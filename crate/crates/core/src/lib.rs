//! Numerical laboratory for harmonic measures on the Hirsch foliation of the
//! doubling map `z -> z^2`.
//!
//! The crate is organised bottom-up:
//!
//! * [`circle_dynamics`]: the doubling map, g-functions and g-measures
//!   (fixed points of the dual transfer operator).
//! * [`pants_geometry`]: the hyperbolic pair of pants `P_{L1,L2}` built from two
//!   slit-glued cylinders, its harmonic function `phi` and geometric audits.
//! * [`foliation`]: the metric family `z -> ds^2_z` and the holonomy rules of
//!   the gluing map.
//! * [`diffusion`]: leafwise Brownian motion with generator `Delta`.
//! * [`harmonic_measures`]: the candidate measure `m = phi vol (x) mu`, its
//!   sampler and the stationarity / distinctness tests.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_dynamics;
pub mod diffusion;
pub mod error;
pub mod foliation;
pub mod harmonic_measures;
pub mod pants_geometry;
pub mod report;
pub mod stats;

pub use circle_dynamics::{CircleAngle, CircleMeasure, GFunction};
pub use error::{Error, Result};
pub use foliation::{FoliatedPoint, MetricFamily};
pub use pants_geometry::{BoundaryId, ChartPoint, Cylinder, PantsShape};
