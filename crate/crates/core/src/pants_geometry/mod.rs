//! The hyperbolic pair of pants `P_{L1,L2}`.
//!
//! Two cylinders `C_i = S^1 x [0, L_i]` with metric `e^{2(v - L_i)} du^2 + dv^2`
//! are cut along the vertical segment `u = 0, 0 <= v <= eps` and cross-glued,
//! producing a cone point of angle `4 pi` at `(u, v) = (0, eps)`. The upper
//! circles `v = L_i` are the positive horocycles `D1`, `D2` of length 1; the two
//! lower circles join into the negative horocycle `D3` of length
//! `e^{-L1} + e^{-L2} = 1`.
//!
//! Points are addressed in the cylinder charts. A third chart, the collar
//! `e^{-2 pi} < |x| <= 1` with metric `|dx| / (|x| (2 pi + log 1/|x|))`, is
//! only used by the audits.

mod audits;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use audits::{
    area, audit_shape, collar_circle_length, collar_curvature, collar_curvature_audit, collar_curvature_with,
    collar_laplace_residual, gauss_bonnet_audit, gauss_bonnet_quadrature, laplace_residual, laplace_residual_of,
    phi_mass_quadrature, smoothing_profile_audit, SmoothingAudit,
};

/// Largest admissible deviation from `e^{-L1} + e^{-L2} = 1`.
pub const SHAPE_TOLERANCE: f64 = 1e-12;

/// Radius below which a point counts as the cone point.
const CONE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cylinder {
    C1,
    C2,
}

impl Cylinder {
    pub fn other(self) -> Self {
        match self {
            Self::C1 => Self::C2,
            Self::C2 => Self::C1,
        }
    }

    /// The upper boundary of this cylinder.
    pub fn upper_boundary(self) -> BoundaryId {
        match self {
            Self::C1 => BoundaryId::D1,
            Self::C2 => BoundaryId::D2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::C1 => "CYL1",
            Self::C2 => "CYL2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryId {
    /// `v = L1` on `C1`.
    D1,
    /// `v = L2` on `C2`.
    D2,
    /// `v = 0` on both cylinders.
    D3,
}

/// Side of the slit `u = 0, v in [0, eps]`, named by increasing `u`: the left
/// side is approached from `u -> 1`, the right side from `u -> 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlitSide {
    Left,
    Right,
}

impl SlitSide {
    pub fn opposite(self) -> Self {
        match self {
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }
}

/// A point on the slit, seen from one cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlitPoint {
    pub cyl: Cylinder,
    pub side: SlitSide,
    pub v: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart")]
pub enum ChartPoint {
    #[serde(rename = "CYL")]
    Cyl { cyl: Cylinder, u: f64, v: f64 },
    #[serde(rename = "COLLAR")]
    Collar { x: Complex64 },
}

impl ChartPoint {
    pub fn cyl(cyl: Cylinder, u: f64, v: f64) -> Self {
        Self::Cyl { cyl, u, v }
    }

    /// `sigma`: swaps the cylinders and fixes `(u, v)`; on the collar it is
    /// `x -> -x`.
    pub fn sigma(self) -> Self {
        match self {
            Self::Cyl { cyl, u, v } => Self::Cyl { cyl: cyl.other(), u, v },
            Self::Collar { x } => Self::Collar { x: -x },
        }
    }

    pub fn chart_name(&self) -> &'static str {
        match self {
            Self::Cyl { cyl, .. } => cyl.name(),
            Self::Collar { .. } => "COLLAR",
        }
    }
}

/// Shape parameters of `P_{L1,L2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PantsShape {
    l1: f64,
    l2: f64,
    eps: f64,
}

impl PantsShape {
    pub fn new(l1: f64, l2: f64, eps: f64) -> Result<Self> {
        if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
            return Err(Error::InvalidShape(format!("lengths must be positive, got L1 = {l1}, L2 = {l2}")));
        }
        let defect = (-l1).exp() + (-l2).exp() - 1.0;
        if defect.abs() > SHAPE_TOLERANCE {
            return Err(Error::InvalidShape(format!(
                "e^-L1 + e^-L2 = {} differs from 1 by {defect:e}",
                1.0 + defect
            )));
        }
        if !(eps > 0.0 && eps <= l1.min(l2)) {
            return Err(Error::InvalidShape(format!(
                "slit length must satisfy 0 < eps <= min(L1, L2) = {}, got {eps}",
                l1.min(l2)
            )));
        }
        Ok(Self { l1, l2, eps })
    }

    /// The shape with `L2` determined by `L1` through `e^{-L1} + e^{-L2} = 1`.
    pub fn from_l1(l1: f64, eps: f64) -> Result<Self> {
        let l2 = -(-(-l1).exp()).ln_1p();
        Self::new(l1, l2, eps)
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn length(&self, cyl: Cylinder) -> f64 {
        match cyl {
            Cylinder::C1 => self.l1,
            Cylinder::C2 => self.l2,
        }
    }

    /// The `sigma`-image shape `(L2, L1)`.
    pub fn swapped(&self) -> Self {
        Self {
            l1: self.l2,
            l2: self.l1,
            eps: self.eps,
        }
    }

    pub fn is_cone_point(&self, p: &ChartPoint) -> bool {
        match *p {
            ChartPoint::Cyl { u, v, .. } => {
                let du = u.min(1.0 - u).abs();
                du <= CONE_TOLERANCE && (v - self.eps).abs() <= CONE_TOLERANCE
            }
            ChartPoint::Collar { .. } => false,
        }
    }

    /// Length of the lower circle of `cyl`, the sub-arc of `D3` it contributes.
    pub fn lower_arc_length(&self, cyl: Cylinder) -> f64 {
        (-self.length(cyl)).exp()
    }

    /// Position on `D3` at normalised arclength `theta`.
    ///
    /// The sub-arcs are centred so that `sigma` acts on `D3` as
    /// `theta -> theta + 1/2`: `C1` covers `theta` in
    /// `[-e^{-L1}/2, e^{-L1}/2)` and `C2` covers the complementary arc centred at
    /// `1/2`. On each, `u` runs from 0 at the slit in the direction of `theta`.
    pub fn d3_chart(&self, theta: f64) -> (Cylinder, f64) {
        let a1 = self.lower_arc_length(Cylinder::C1);
        let t = (theta + 0.5 * a1).rem_euclid(1.0);
        if t < a1 {
            (Cylinder::C1, clamp_unit(t / a1))
        } else {
            (Cylinder::C2, clamp_unit((t - a1) / self.lower_arc_length(Cylinder::C2)))
        }
    }

    /// Inverse of [`PantsShape::d3_chart`].
    pub fn d3_param(&self, cyl: Cylinder, u: f64) -> f64 {
        let a1 = self.lower_arc_length(Cylinder::C1);
        let t = match cyl {
            Cylinder::C1 => u * a1,
            Cylinder::C2 => a1 + u * self.lower_arc_length(Cylinder::C2),
        };
        (t - 0.5 * a1).rem_euclid(1.0)
    }
}

/// Largest `f64` below 1.
pub(crate) const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

fn clamp_unit(u: f64) -> f64 {
    u.clamp(0.0, BELOW_ONE)
}

/// Conformal factor `lambda(x) = 1 / (|x| (2 pi + log 1/|x|))` of the collar.
pub fn collar_lambda(x: Complex64) -> f64 {
    let r = x.norm();
    1.0 / (r * (TAU - r.ln()))
}

/// Metric tensor in chart coordinates.
pub fn metric_at(shape: &PantsShape, p: &ChartPoint) -> Result<[[f64; 2]; 2]> {
    if shape.is_cone_point(p) {
        return Err(Error::SingularPoint);
    }
    Ok(match *p {
        ChartPoint::Cyl { cyl, v, .. } => [[(2.0 * (v - shape.length(cyl))).exp(), 0.0], [0.0, 1.0]],
        ChartPoint::Collar { x } => {
            let l2 = collar_lambda(x).powi(2);
            [[l2, 0.0], [0.0, l2]]
        }
    })
}

/// Length of a boundary component.
pub fn boundary_length(shape: &PantsShape, b: BoundaryId) -> f64 {
    match b {
        // exp(2(v - L)) at v = L is exactly 1
        BoundaryId::D1 | BoundaryId::D2 => 1.0,
        BoundaryId::D3 => shape.lower_arc_length(Cylinder::C1) + shape.lower_arc_length(Cylinder::C2),
    }
}

/// The harmonic function `phi`: `e^{-v}` on the cylinders and
/// `1 + log(1/|x|) / (2 pi)` on the collar.
pub fn harmonic_phi(_shape: &PantsShape, p: &ChartPoint) -> f64 {
    match *p {
        ChartPoint::Cyl { v, .. } => (-v).exp(),
        ChartPoint::Collar { x } => 1.0 - x.norm().ln() / TAU,
    }
}

/// Crosses the slit: the given side in one cylinder is glued to the opposite
/// side in the other, at the same height.
pub fn slit_crossing(shape: &PantsShape, from: Cylinder, side: SlitSide, v: f64) -> Result<SlitPoint> {
    if v == shape.eps {
        return Err(Error::AtConePoint);
    }
    if !(0.0..shape.eps).contains(&v) {
        return Err(Error::InvalidConfig(format!("v = {v} is not on the slit [0, {})", shape.eps)));
    }
    Ok(SlitPoint {
        cyl: from.other(),
        side: side.opposite(),
        v,
    })
}
