//! Leafwise Brownian motion with generator `Delta` (not `Delta / 2`).
//!
//! In the half-plane coordinates `y = e^{L_i - v}` of a cylinder the metric is
//! `(du^2 + dy^2) / y^2` and the generator is `y^2 (d_u^2 + d_y^2)`. One Euler
//! step `(u, y) -> (u + a y N1, y (1 + a N2))`, `a = sqrt(2 dt)`, is right
//! multiplication in the affine group `x -> y x + u`, while every chart change
//! of the pants (wrap, slit, holonomy) is a left multiplication. The step is
//! therefore chart independent, and it preserves `du dy / y`, the measure
//! `phi dvol` in these coordinates.

mod exit;
mod walker;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pants_geometry::{ChartPoint, PantsShape};

pub use exit::{exit_problem, exit_study, ExitSample, ExitStudy};
pub use walker::{evolve, simulate_path, Event, EventCounts, Sample, Trajectory, Walker};

/// Maximum number of step halvings before giving up.
pub const MAX_HALVINGS: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiffusionConfig {
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Radius of the reflecting disk around the cone point.
    pub cone_guard: f64,
    /// Per-path cap on crossing events.
    pub max_events: usize,
}

impl DiffusionConfig {
    pub fn new(dt: f64, t_end: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            dt,
            t_end,
            seed,
            cone_guard: 1e-6,
            max_events: 1_000_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 1e-2) {
            return Err(Error::InvalidConfig(format!("dt must lie in (0, 1e-2], got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end must be finite and >= 0, got {}", self.t_end)));
        }
        if !(self.cone_guard > 0.0) {
            return Err(Error::InvalidConfig(format!("cone guard must be positive, got {}", self.cone_guard)));
        }
        if self.max_events == 0 {
            return Err(Error::InvalidConfig("max_events must be positive".into()));
        }
        Ok(())
    }
}

/// Per-path random stream: ChaCha8 keyed by the seed, with the path index as
/// the stream id. Draws depend only on `(seed, path, position in the stream)`.
#[derive(Clone, Debug)]
pub struct PathRng(ChaCha8Rng);

impl PathRng {
    pub fn new(seed: u64, path: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path);
        Self(rng)
    }

    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random()
    }
}

/// `(u, y)` with `y = e^{L_i - v}`.
pub fn halfplane_coords(shape: &PantsShape, p: &ChartPoint) -> Result<(f64, f64)> {
    match *p {
        ChartPoint::Cyl { cyl, u, v } => Ok((u, (shape.length(cyl) - v).exp())),
        ChartPoint::Collar { .. } => Err(Error::InvalidConfig("half-plane coordinates need a cylinder chart".into())),
    }
}

/// Inverse of [`halfplane_coords`] on `cyl`.
pub fn from_halfplane(shape: &PantsShape, cyl: crate::pants_geometry::Cylinder, u: f64, y: f64) -> ChartPoint {
    ChartPoint::cyl(cyl, u, shape.length(cyl) - y.ln())
}

/// One Euler-Maruyama step inside the chart of `p`, with no boundary handling.
///
/// A step that would make `y` nonpositive is retried with `dt` halved (same
/// noise) up to [`MAX_HALVINGS`] times.
pub fn step(shape: &PantsShape, p: &ChartPoint, dt: f64, noise: [f64; 2]) -> Result<ChartPoint> {
    let ChartPoint::Cyl { cyl, .. } = *p else {
        return Err(Error::InvalidConfig("the walker moves in cylinder charts only".into()));
    };
    if !(dt >= 0.0) {
        return Err(Error::InvalidConfig(format!("negative time step {dt}")));
    }
    if dt == 0.0 {
        return Ok(*p);
    }
    let (u, y) = halfplane_coords(shape, p)?;
    let mut h = dt;
    for _ in 0..=MAX_HALVINGS {
        let a = (2.0 * h).sqrt();
        let d = 1.0 + a * noise[1];
        if d > 0.0 {
            return Ok(from_halfplane(shape, cyl, u + a * y * noise[0], y * d));
        }
        h *= 0.5;
    }
    Err(Error::StepUnderflow { levels: MAX_HALVINGS })
}

/// Maps `f` over path indices `0..n`, in parallel when the `parallel` feature
/// is on. The output order is the index order regardless of scheduling.
pub fn map_paths<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pants_geometry::Cylinder;
    use std::f64::consts::LN_2;

    fn log2() -> PantsShape {
        PantsShape::new(LN_2, LN_2, 0.1).unwrap()
    }

    #[test]
    fn config_bounds() {
        assert!(DiffusionConfig::new(1e-2, 1.0, 0).is_ok());
        assert!(DiffusionConfig::new(2e-2, 1.0, 0).is_err());
        assert!(DiffusionConfig::new(0.0, 1.0, 0).is_err());
        assert!(DiffusionConfig::new(1e-3, -1.0, 0).is_err());
    }

    #[test]
    fn halfplane_round_trip() {
        let s = log2();
        let (_, y) = halfplane_coords(&s, &ChartPoint::cyl(Cylinder::C1, 0.2, LN_2)).unwrap();
        assert_eq!(y, 1.0);
        let (_, y) = halfplane_coords(&s, &ChartPoint::cyl(Cylinder::C1, 0.2, 0.0)).unwrap();
        assert_eq!(y, 2.0);
        for k in 0..=20 {
            let v = LN_2 * k as f64 / 20.0;
            let p = ChartPoint::cyl(Cylinder::C2, 0.7, v);
            let (u, y) = halfplane_coords(&s, &p).unwrap();
            let ChartPoint::Cyl { v: back, .. } = from_halfplane(&s, Cylinder::C2, u, y) else { unreachable!() };
            assert!((back - v).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let s = log2();
        let p = ChartPoint::cyl(Cylinder::C1, 0.4, 0.3);
        assert_eq!(step(&s, &p, 0.0, [1.0, -2.0]).unwrap(), p);
    }

    #[test]
    fn step_halves_until_positive() {
        let s = log2();
        let p = ChartPoint::cyl(Cylinder::C1, 0.4, LN_2);
        // a = sqrt(2e-2) ~ 0.14, so N2 = -10 needs two halvings
        assert!(step(&s, &p, 1e-2, [0.0, -10.0]).is_ok());
        assert!(matches!(
            step(&s, &p, 1e-2, [0.0, f64::NEG_INFINITY]),
            Err(Error::StepUnderflow { levels: 40 })
        ));
    }

    #[test]
    fn quadratic_variation_of_u() {
        let s = log2();
        let p = ChartPoint::cyl(Cylinder::C1, 0.5, LN_2);
        let dt = 1e-4;
        let n = 1_000_000;
        let mut rng = PathRng::new(7, 0);
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let q = step(&s, &p, dt, [rng.normal(), rng.normal()]).unwrap();
            let ChartPoint::Cyl { u, .. } = q else { unreachable!() };
            let d2 = (u - 0.5) * (u - 0.5);
            sum += d2;
            sum2 += d2 * d2;
        }
        let mean = sum / n as f64;
        let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 2e-4).abs() <= 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<f64> = (0..5).map(|_| 0.0).scan(PathRng::new(1, 3), |r, _| Some(r.normal())).collect();
        let _ = PathRng::new(1, 2).normal();
        let b: Vec<f64> = (0..5).map(|_| 0.0).scan(PathRng::new(1, 3), |r, _| Some(r.normal())).collect();
        assert_eq!(a, b);
        assert_ne!(PathRng::new(1, 3).normal(), PathRng::new(1, 4).normal());
    }
}
