use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::{boundary_length, collar_lambda, harmonic_phi, slit_crossing, BoundaryId, ChartPoint, Cylinder, PantsShape, SlitSide};
use crate::report::AuditRecord;

const CYLINDERS: [Cylinder; 2] = [Cylinder::C1, Cylinder::C2];

/// `sqrt(E)` for the cylinder metric `E du^2 + dv^2`.
fn sqrt_e(l: f64, v: f64) -> f64 {
    (v - l).exp()
}

/// Midpoint-rule integral of `density(cyl, u, v)` over both cylinders on an
/// `n x n` grid each.
fn integrate_cylinders(shape: &PantsShape, n: usize, density: impl Fn(Cylinder, f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for cyl in CYLINDERS {
        let l = shape.length(cyl);
        let (hu, hv) = (1.0 / n as f64, l / n as f64);
        let mut s = 0.0;
        for k in 0..n {
            let v = (k as f64 + 0.5) * hv;
            for j in 0..n {
                s += density(cyl, (j as f64 + 0.5) * hu, v);
            }
        }
        total += s * hu * hv;
    }
    total
}

/// Area of the pants by quadrature of `e^{v - L_i} du dv`; the exact value is
/// `2 - e^{-L1} - e^{-L2} = 1`.
pub fn area(shape: &PantsShape, grid: usize) -> f64 {
    integrate_cylinders(shape, grid, |cyl, _, v| sqrt_e(shape.length(cyl), v))
}

/// `int phi dvol` by quadrature; the exact value is `L1 e^{-L1} + L2 e^{-L2}`.
pub fn phi_mass_quadrature(shape: &PantsShape, grid: usize) -> f64 {
    integrate_cylinders(shape, grid, |cyl, u, v| {
        harmonic_phi(shape, &ChartPoint::cyl(cyl, u, v)) * sqrt_e(shape.length(cyl), v)
    })
}

/// Gauss-Bonnet with the closed-form ingredients: curvature `-1`, boundary
/// horocycles of signed curvature `+1, +1, -1`, one cone point of angle `4 pi`.
/// Returns `|total - 2 pi chi|`, `chi = -1`.
pub fn gauss_bonnet_audit(shape: &PantsShape) -> f64 {
    let area = 2.0 - shape.lower_arc_length(Cylinder::C1) - shape.lower_arc_length(Cylinder::C2);
    let boundary = boundary_length(shape, BoundaryId::D1) + boundary_length(shape, BoundaryId::D2)
        - boundary_length(shape, BoundaryId::D3);
    let total = -area + boundary + (TAU - 2.0 * TAU);
    (total + TAU).abs()
}

/// Gauss-Bonnet with every ingredient computed numerically from the metric:
/// `K = -(sqrt E)_vv / sqrt E` and `k_g = -(d sqrt E / d n_in) / sqrt E` by
/// finite differences, areas and lengths by the midpoint rule.
pub fn gauss_bonnet_quadrature(shape: &PantsShape, grid: usize) -> f64 {
    let d = 1e-3;
    let curvature = |l: f64, v: f64| {
        let s = sqrt_e(l, v);
        -(sqrt_e(l, v + d) - 2.0 * s + sqrt_e(l, v - d)) / (d * d) / s
    };
    let ddv = |l: f64, v: f64| (sqrt_e(l, v + d) - sqrt_e(l, v - d)) / (2.0 * d);
    let total_curvature = integrate_cylinders(shape, grid, |cyl, _, v| {
        let l = shape.length(cyl);
        curvature(l, v) * sqrt_e(l, v)
    });
    let hu = 1.0 / grid as f64;
    let mut boundary = 0.0;
    for cyl in CYLINDERS {
        let l = shape.length(cyl);
        // upper circle: inward normal is -d/dv; lower circle: +d/dv
        let (kg_top, kg_bottom) = (ddv(l, l) / sqrt_e(l, l), -ddv(l, 0.0) / sqrt_e(l, 0.0));
        let (len_top, len_bottom) = (0..grid).fold((0.0, 0.0), |(a, b), _| {
            (a + sqrt_e(l, l) * hu, b + sqrt_e(l, 0.0) * hu)
        });
        boundary += kg_top * len_top + kg_bottom * len_bottom;
    }
    let cone = TAU - 2.0 * TAU;
    (total_curvature + boundary + cone + TAU).abs()
}

/// Maximum of `|Delta phi|` for `phi = e^{-v}`, see [`laplace_residual_of`].
pub fn laplace_residual(shape: &PantsShape, h: f64) -> f64 {
    laplace_residual_of(shape, h, |_, _, v| (-v).exp())
}

/// Maximum over interior grid points of the central-difference
/// Laplace-Beltrami operator
/// `Delta f = e^{-2(v - L)} f_uu + f_vv + f_v`
/// applied to `f`, on the grid `u = j h`, `v = k h` of each cylinder.
///
/// Points closer than `h` to a boundary circle, within `4h` of the cone point,
/// or whose stencil would straddle the slit are skipped.
pub fn laplace_residual_of(shape: &PantsShape, h: f64, f: impl Fn(Cylinder, f64, f64) -> f64) -> f64 {
    let n_u = (1.0 / h).round() as usize;
    let mut worst = 0.0f64;
    for cyl in CYLINDERS {
        let l = shape.length(cyl);
        let mut k = 1;
        while (k as f64 + 1.0) * h <= l + 1e-12 {
            let v = k as f64 * h;
            let w = (-2.0 * (v - l)).exp();
            for j in 0..n_u {
                let u = j as f64 * h;
                let du = u.min(1.0 - u);
                if du.hypot(v - shape.eps()) < 4.0 * h || (du < 1.5 * h && v <= shape.eps() + h) {
                    continue;
                }
                let c = f(cyl, u, v);
                let f_uu = (f(cyl, (u + h).rem_euclid(1.0), v) - 2.0 * c + f(cyl, (u - h).rem_euclid(1.0), v)) / (h * h);
                let (up, dn) = (f(cyl, u, v + h), f(cyl, u, v - h));
                let f_vv = (up - 2.0 * c + dn) / (h * h);
                let f_v = (up - dn) / (2.0 * h);
                worst = worst.max((w * f_uu + f_vv + f_v).abs());
            }
            k += 1;
        }
    }
    worst
}

/// Maximum Euclidean five-point Laplacian of the collar harmonic function over
/// grid points with `1/4 <= |x| <= 1 - h`.
pub fn collar_laplace_residual(h: f64) -> f64 {
    let phi = |x: f64, y: f64| 1.0 - x.hypot(y).ln() / TAU;
    let n = (1.0 / h).round() as i64;
    let mut worst = 0.0f64;
    for i in -n..=n {
        for j in -n..=n {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let r = x.hypot(y);
            if !(0.25..=1.0 - h).contains(&r) {
                continue;
            }
            let lap = (phi(x + h, y) + phi(x - h, y) + phi(x, y + h) + phi(x, y - h) - 4.0 * phi(x, y)) / (h * h);
            worst = worst.max(lap.abs());
        }
    }
    worst
}

/// Gaussian curvature `K = -lambda^{-2} Delta log lambda` of the conformal
/// metric `lambda(x)^2 |dx|^2`, with a fourth-order finite-difference
/// Laplacian of step `1e-3 |x|`.
pub fn collar_curvature_with(lambda: impl Fn(Complex64) -> f64, x: Complex64) -> f64 {
    let d = 1e-3 * x.norm();
    let f = |dx: f64, dy: f64| lambda(x + Complex64::new(dx, dy)).ln();
    let c = f(0.0, 0.0);
    let second =
        |g: &dyn Fn(f64) -> f64| (16.0 * (g(d) + g(-d)) - (g(2.0 * d) + g(-2.0 * d)) - 30.0 * c) / (12.0 * d * d);
    let lap = second(&|t| f(t, 0.0)) + second(&|t| f(0.0, t));
    -lap / lambda(x).powi(2)
}

pub fn collar_curvature(x: Complex64) -> f64 {
    collar_curvature_with(collar_lambda, x)
}

/// `max |K + 1|` over `samples` points spread geometrically in radius across
/// `e^{-2 pi} < |x| < 1` and quasi-randomly in angle.
pub fn collar_curvature_audit(samples: usize) -> f64 {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    (0..samples)
        .map(|k| {
            let r = (-TAU * (k as f64 + 0.5) / samples as f64).exp();
            let x = Complex64::from_polar(r, TAU * (k as f64 * golden).fract());
            (collar_curvature(x) + 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Length of the circle `|x| = r` in the collar metric, by the trapezoid rule
/// with `n` nodes.
pub fn collar_circle_length(r: f64, n: usize) -> f64 {
    let h = TAU / n as f64;
    (0..n)
        .map(|k| collar_lambda(Complex64::from_polar(r, k as f64 * h)) * r * h)
        .sum()
}

/// Outcome of [`smoothing_profile_audit`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothingAudit {
    /// `max |rho |x|^2 I - I|` inside `r_inner` for `rho = 1/|x|^2`.
    pub smoothed_deviation: f64,
    /// Same quantity for the control `rho = 1`, which stays degenerate.
    pub control_deviation: f64,
    /// Circumference over geodesic radius for `|x|^2 |dx|^2`.
    pub cone_angle: f64,
}

/// The smoothed metric `rho |x|^2 |dx|^2` near the cone point, and the cone
/// angle of the unsmoothed metric `|x|^2 |dx|^2`.
pub fn smoothing_profile_audit(r_inner: f64) -> SmoothingAudit {
    let samples = 64;
    let radii = (1..=samples).map(|k| r_inner * k as f64 / (samples + 1) as f64);
    let deviation = |rho: &dyn Fn(f64) -> f64| {
        radii
            .clone()
            .map(|r| (rho(r) * r * r - 1.0).abs())
            .fold(0.0, f64::max)
    };
    let smoothed_deviation = deviation(&|r| 1.0 / (r * r));
    let control_deviation = deviation(&|_| 1.0);

    let r = 0.5 * r_inner;
    let n = 256;
    // metric length element |x| |dx|
    let circumference: f64 = (0..n).map(|_| r * r * TAU / n as f64).sum();
    // Simpson's rule is exact for the integrand s
    let radius = r / 6.0 * (0.0 + 4.0 * (0.5 * r) + r);
    SmoothingAudit {
        smoothed_deviation,
        control_deviation,
        cone_angle: circumference / radius,
    }
}

/// Runs every geometric audit for one shape. `grid` sets the area and
/// Gauss-Bonnet quadratures and the Laplace residual spacing `h = 1/grid`.
pub fn audit_shape(shape: &PantsShape, grid: usize) -> Vec<AuditRecord> {
    let h = 1.0 / grid as f64;
    let mut out = Vec::new();

    let area_tol = 1e-6 * (256.0 * h).powi(2);
    out.push(AuditRecord::within("area", (area(shape, grid) - 1.0).abs(), Some(h), area_tol));

    let lengths = [
        (boundary_length(shape, BoundaryId::D1) - 1.0).abs(),
        (boundary_length(shape, BoundaryId::D2) - 1.0).abs(),
        (boundary_length(shape, BoundaryId::D3) - 1.0).abs(),
    ];
    out.push(AuditRecord::within("boundary_lengths", lengths.into_iter().fold(0.0, f64::max), None, 1e-12));

    out.push(AuditRecord::within("gauss_bonnet_closed_form", gauss_bonnet_audit(shape), None, 1e-10));
    out.push(AuditRecord::within("gauss_bonnet_quadrature", gauss_bonnet_quadrature(shape, grid), Some(h), 1e-4));

    let phi_at = |cyl, v| harmonic_phi(shape, &ChartPoint::cyl(cyl, 0.5, v));
    let phi_err = [
        (phi_at(Cylinder::C1, shape.l1()) - shape.lower_arc_length(Cylinder::C1)).abs(),
        (phi_at(Cylinder::C2, shape.l2()) - shape.lower_arc_length(Cylinder::C2)).abs(),
        (phi_at(Cylinder::C1, 0.0) - 1.0).abs(),
        (phi_at(Cylinder::C2, 0.0) - 1.0).abs(),
    ];
    out.push(AuditRecord::within("phi_boundary_values", phi_err.into_iter().fold(0.0, f64::max), None, 0.0));

    let mass = shape.l1() * shape.lower_arc_length(Cylinder::C1) + shape.l2() * shape.lower_arc_length(Cylinder::C2);
    out.push(AuditRecord::within("phi_mass", (phi_mass_quadrature(shape, grid) - mass).abs(), Some(h), 1e-8));

    out.push(AuditRecord::within("laplace_residual", laplace_residual(shape, h), Some(h), h * h));
    out.push(AuditRecord::within(
        "laplace_constant",
        laplace_residual_of(shape, h, |_, _, _| 1.0),
        Some(h),
        0.0,
    ));
    let r = [32.0, 64.0, 128.0].map(|n| laplace_residual(shape, 1.0 / n));
    let worst_ratio = [r[0] / r[1], r[1] / r[2]]
        .into_iter()
        .map(|q| (q / 4.0 - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(AuditRecord::within("laplace_order", worst_ratio, Some(1.0 / 128.0), 0.2));

    let c = [collar_laplace_residual(1.0 / 64.0), collar_laplace_residual(1.0 / 128.0)];
    out.push(AuditRecord::within("collar_laplace_order", (c[0] / c[1] / 4.0 - 1.0).abs(), Some(1.0 / 128.0), 0.2));

    out.push(AuditRecord::within("collar_curvature", collar_curvature_audit(100), None, 1e-6));
    let flat = collar_curvature_with(|_| 0.37, Complex64::new(0.5, 0.1));
    out.push(AuditRecord::within("collar_flat_control", flat.abs(), None, 0.0));
    out.push(AuditRecord::within(
        "collar_circle_length",
        (collar_circle_length(1.0, 64) - 1.0).abs(),
        None,
        1e-10,
    ));

    let sm = smoothing_profile_audit(0.01);
    out.push(AuditRecord::within("smoothing_profile", sm.smoothed_deviation, None, 1e-12));
    out.push(AuditRecord::within("cone_angle", (sm.cone_angle - 4.0 * PI).abs(), None, 1e-6));

    let slit = (0..16)
        .map(|k| shape.eps() * k as f64 / 16.0)
        .flat_map(|v| CYLINDERS.map(|c| (c, v)))
        .map(|(c, v)| {
            let once = slit_crossing(shape, c, SlitSide::Right, v).expect("v below eps");
            let twice = slit_crossing(shape, once.cyl, once.side, once.v).expect("v below eps");
            let same = twice.cyl == c && twice.side == SlitSide::Right && twice.v == v && once.v == v;
            if same { 0.0 } else { 1.0 }
        })
        .fold(0.0, f64::max);
    out.push(AuditRecord::within("slit_involution", slit, None, 0.0));
    out
}
