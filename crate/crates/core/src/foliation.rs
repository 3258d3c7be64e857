//! The Hirsch foliation: the metric family `z -> ds^2_z` with
//! `L1(z) = log g(z)`, `L2(z) = log g(-z)`, and the crossing rules of the
//! gluing map `(x, z) -> (x z / 4 + 1/2, z^2)`.
//!
//! Points carry a representative `z` on the double cover; `(p, z)` and
//! `(sigma(p), z + 1/2)` are the same point of the foliated manifold. The leaf
//! space coordinate of a pants is `T(z) = 2z`, which is what transverse
//! measures are defined on.

use serde::{Deserialize, Serialize};

use crate::circle_dynamics::{validate_g, CircleAngle, GFunction};
use crate::error::{Error, Result};
use crate::pants_geometry::{audit_shape, metric_at, BoundaryId, ChartPoint, Cylinder, PantsShape};
use crate::report::AuditRecord;

/// Dyadic level on which a family's `g` is validated.
pub const FAMILY_GRID_LEVEL: u32 = 16;

/// `z -> P_{L1(z), L2(z)}` with a common slit length `eps < inf log g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricFamily {
    g: GFunction,
    eps: f64,
    inf_log_g: f64,
}

impl MetricFamily {
    /// With `eps = None` the slit length defaults to `inf log g / 2`.
    pub fn new(g: GFunction, eps: Option<f64>) -> Result<Self> {
        let report = validate_g(&g, FAMILY_GRID_LEVEL)?;
        let eps = eps.unwrap_or(0.5 * report.inf_log_g);
        if !(eps > 0.0 && eps < report.inf_log_g) {
            return Err(Error::InvalidSpec(format!(
                "slit length must satisfy 0 < eps < inf log g = {}, got {eps}",
                report.inf_log_g
            )));
        }
        Ok(Self {
            g,
            eps,
            inf_log_g: report.inf_log_g,
        })
    }

    /// Parses a g-function spec with an optional `eps=` parameter, e.g.
    /// `sine:a=0.3,eps=0.05` or `const2,eps=0.1`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let mut eps = None;
        let mut rest = Vec::new();
        for (i, part) in spec.split(',').enumerate() {
            match part.trim().strip_prefix("eps=") {
                Some(v) if i > 0 => {
                    eps = Some(
                        v.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::InvalidSpec(format!("bad eps `{v}`: {e}")))?,
                    )
                }
                _ => rest.push(part),
            }
        }
        let g_spec = rest.join(",");
        let g_spec = g_spec.trim_end_matches(':');
        Self::new(GFunction::from_spec(g_spec)?, eps)
    }

    pub fn spec(&self) -> String {
        format!("{},eps={}", self.g.spec(), self.eps)
    }

    pub fn g(&self) -> &GFunction {
        &self.g
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn inf_log_g(&self) -> f64 {
        self.inf_log_g
    }

    /// `(L1(z), L2(z)) = (log g(z), log g(z + 1/2))`.
    pub fn lengths_at(&self, z: CircleAngle) -> (f64, f64) {
        (self.g.log_g(z.turns()), self.g.log_g(z.antipode().turns()))
    }

    pub fn pants_shape_at(&self, z: CircleAngle) -> Result<PantsShape> {
        let (l1, l2) = self.lengths_at(z);
        PantsShape::new(l1, l2, self.eps)
    }
}

/// A point of the foliated manifold: a double-cover representative `z` and a
/// chart point of the pants over it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoliatedPoint {
    pub z: CircleAngle,
    pub p: ChartPoint,
}

impl FoliatedPoint {
    pub fn new(z: CircleAngle, p: ChartPoint) -> Self {
        Self { z, p }
    }

    /// The other representative `(sigma(p), z + 1/2)`.
    pub fn sigma_image(&self) -> Self {
        Self {
            z: self.z.antipode(),
            p: self.p.sigma(),
        }
    }

    /// The representative with `z` in `[0, 1/2)`.
    pub fn canonical(&self) -> Self {
        if self.z >= CircleAngle::HALF {
            self.sigma_image()
        } else {
            *self
        }
    }

    /// Leaf-space coordinate `T(z)` of the pants containing this point.
    pub fn label(&self) -> CircleAngle {
        self.z.doubled()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Through `D3`, into the pants over `z^2`.
    Outward,
    /// Through `D1` or `D2`, into a pants over a square root.
    Inward,
}

/// A transverse change recorded when a path leaves a pants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyEvent {
    pub boundary: BoundaryId,
    pub theta_exit: f64,
    pub theta_arrival: f64,
    pub z_before: CircleAngle,
    pub z_after: CircleAngle,
    pub direction: Direction,
}

/// Leaving the pants over `z` through `D3` at parameter `theta_exit`: arrive on
/// `D1` of the pants over `2z`, rotated by `z`.
pub fn cross_outward(z: CircleAngle, theta_exit: CircleAngle) -> (CircleAngle, BoundaryId, CircleAngle) {
    (z.doubled(), BoundaryId::D1, theta_exit + z)
}

/// Leaving the pants over `z` through `D1` or `D2`: arrive on `D3` of the pants
/// over a square root `w`.
///
/// `D1` takes the principal root `w = z/2`. `D2` over `z` is `D1` over `z + 1/2`
/// and takes `w = (z + 1/2)/2`, so `T(w) = -z`. The arrival parameter is
/// `theta_exit - w`, undoing the rotation of [`cross_outward`].
pub fn cross_inward(
    z: CircleAngle,
    boundary: BoundaryId,
    theta_exit: CircleAngle,
) -> Result<(CircleAngle, CircleAngle)> {
    let w = match boundary {
        BoundaryId::D1 => z.halved(),
        BoundaryId::D2 => z.antipode().halved(),
        BoundaryId::D3 => {
            return Err(Error::InvalidConfig("inward crossings leave through D1 or D2".into()));
        }
    };
    Ok((w, theta_exit - w))
}

/// Whether `(z, theta)` on `D3` name the same point of the foliated manifold,
/// i.e. agree up to `(z, theta) ~ (z + 1/2, theta + 1/2)`.
pub fn same_on_d3(a: (CircleAngle, CircleAngle), b: (CircleAngle, CircleAngle)) -> bool {
    a == b || (a.0.antipode(), a.1.antipode()) == b
}

/// `max` entry-wise deviation between `metric_at(a, p)` and
/// `metric_at(b, sigma(p))` over a `samples x samples` grid on each cylinder.
pub fn sigma_deviation(a: &PantsShape, b: &PantsShape, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for cyl in [Cylinder::C1, Cylinder::C2] {
        for i in 0..samples {
            for j in 0..samples {
                let u = (i as f64 + 0.5) / samples as f64;
                let v = a.length(cyl) * (j as f64 + 0.5) / samples as f64;
                let p = ChartPoint::cyl(cyl, u, v);
                let ma = metric_at(a, &p)?;
                let mb = metric_at(b, &p.sigma())?;
                for (ra, rb) in ma.iter().zip(&mb) {
                    for (x, y) in ra.iter().zip(rb) {
                        worst = worst.max((x - y).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// The pants over `z` and over `-z` are `sigma`-images of one another.
pub fn sigma_symmetry_audit(fam: &MetricFamily, z: CircleAngle, samples: usize) -> Result<f64> {
    sigma_deviation(&fam.pants_shape_at(z)?, &fam.pants_shape_at(z.antipode())?, samples)
}

/// Shape audits of the pants over `z`, plus the family-level checks.
pub fn audit_family(fam: &MetricFamily, z: CircleAngle, grid: usize) -> Result<Vec<AuditRecord>> {
    let shape = fam.pants_shape_at(z)?;
    let mut out = audit_shape(&shape, grid);
    out.push(AuditRecord::within("sigma_symmetry", sigma_symmetry_audit(fam, z, 32)?, None, 1e-12));
    let (l1, l2) = fam.lengths_at(z);
    out.push(AuditRecord::within(
        "length_constraint",
        ((-l1).exp() + (-l2).exp() - 1.0).abs(),
        None,
        1e-12,
    ));
    let theta = CircleAngle::from_turns(0.3);
    let (z2, _, t) = cross_outward(z, theta);
    let (w, back) = cross_inward(z2, BoundaryId::D1, t)?;
    let round_trip = if same_on_d3((w, back), (z, theta)) { 0.0 } else { 1.0 };
    out.push(AuditRecord::within("crossing_round_trip", round_trip, None, 0.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn shapes_over_the_circle() {
        let fam = MetricFamily::new(GFunction::Constant2, Some(0.1)).unwrap();
        let s = fam.pants_shape_at(CircleAngle::from_turns(0.37)).unwrap();
        assert_eq!((s.l1(), s.l2()), (LN_2, LN_2));

        let fam = MetricFamily::from_spec("sine:a=0.5,eps=0.05").unwrap();
        let s = fam.pants_shape_at(CircleAngle::from_turns(0.25)).unwrap();
        assert!((s.l1() - (4.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((s.l2() - 4f64.ln()).abs() < 1e-15);
        assert!(((-s.l1()).exp() + (-s.l2()).exp() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eps_floor() {
        let err = MetricFamily::from_spec("sine:a=0.9,eps=0.1").unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)), "{err}");
        let fam = MetricFamily::from_spec("sine:a=0.9").unwrap();
        assert!((fam.inf_log_g() - (2.0f64 / 1.9).ln()).abs() < 1e-15);
        assert_eq!(fam.eps(), 0.5 * fam.inf_log_g());
        assert!(MetricFamily::from_spec("const2,eps=0.1").is_ok());
        assert!(MetricFamily::from_spec("const2,eps=zero").is_err());
    }

    #[test]
    fn spec_round_trip() {
        let fam = MetricFamily::from_spec("sine:a=0.3,eps=0.05").unwrap();
        assert_eq!(MetricFamily::from_spec(&fam.spec()).unwrap(), fam);
    }

    #[test]
    fn outward_examples() {
        let (z, b, t) = cross_outward(CircleAngle::ZERO, CircleAngle::ZERO);
        assert_eq!((z, b, t), (CircleAngle::ZERO, BoundaryId::D1, CircleAngle::ZERO));
        let (z, _, t) = cross_outward(CircleAngle::HALF, CircleAngle::from_turns(0.25));
        assert_eq!((z.turns(), t.turns()), (0.0, 0.75));
    }

    #[test]
    fn inward_examples() {
        let (w, t) = cross_inward(CircleAngle::ZERO, BoundaryId::D1, CircleAngle::ZERO).unwrap();
        assert_eq!((w, t), (CircleAngle::ZERO, CircleAngle::ZERO));
        let (w, t) = cross_inward(CircleAngle::ZERO, BoundaryId::D2, CircleAngle::ZERO).unwrap();
        assert_eq!((w.turns(), t.turns()), (0.25, 0.75));
        // the same point seen from the other representative
        assert_eq!((w.antipode().turns(), t.antipode().turns()), (0.75, 0.25));
        assert!(cross_inward(CircleAngle::ZERO, BoundaryId::D3, CircleAngle::ZERO).is_err());
    }

    #[test]
    fn sigma_audit() {
        let fam = MetricFamily::new(GFunction::Constant2, Some(0.1)).unwrap();
        assert_eq!(sigma_symmetry_audit(&fam, CircleAngle::from_turns(0.1), 16).unwrap(), 0.0);
        let fam = MetricFamily::from_spec("sine:a=0.5,eps=0.05").unwrap();
        assert!(sigma_symmetry_audit(&fam, CircleAngle::from_turns(0.25), 16).unwrap() <= 1e-12);
        let a = fam.pants_shape_at(CircleAngle::from_turns(0.25)).unwrap();
        let wrong = PantsShape::new(LN_2, LN_2, 0.05).unwrap();
        assert!(sigma_deviation(&a, &wrong, 16).unwrap() > 0.01);
    }

    #[test]
    fn family_audit_passes() {
        let fam = MetricFamily::from_spec("sine:a=0.5,eps=0.05").unwrap();
        let records = audit_family(&fam, CircleAngle::from_turns(0.25), 128).unwrap();
        let failed: Vec<_> = records.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }
}
