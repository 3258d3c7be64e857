use serde::Serialize;

use super::{map_paths, PathRng, Walker};
use crate::error::{Error, Result};
use crate::pants_geometry::{harmonic_phi, BoundaryId, ChartPoint, Cylinder, PantsShape};

/// Step cap for a single exit path.
const MAX_EXIT_STEPS: u64 = 100_000_000;

/// First boundary hit of a path started inside one pants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExitSample {
    pub boundary: BoundaryId,
    /// Boundary value of `phi` at the exit: `e^{-L_i}` on `D_i`, 1 on `D3`.
    pub phi_exit: f64,
    /// `phi` at the walker's own position after the exit step (unclamped).
    pub phi_last: f64,
    pub steps: u64,
}

/// Runs one path until it leaves `shape`.
///
/// Besides the discrete crossings, a step whose endpoints both lie inside is
/// stopped at a boundary with the Brownian-bridge probability
/// `exp(-(b - v0)(b - v1) / dt)`: the `v`-coordinate is a Brownian motion with
/// drift 1 and variance 2 per unit time.
pub fn exit_problem(shape: &PantsShape, start: ChartPoint, dt: f64, cone_guard: f64, rng: &mut PathRng) -> Result<ExitSample> {
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let mut w = Walker::in_pants(*shape, start, cone_guard)?;
    let boundary_phi = |b: BoundaryId| match b {
        BoundaryId::D1 => shape.lower_arc_length(Cylinder::C1),
        BoundaryId::D2 => shape.lower_arc_length(Cylinder::C2),
        BoundaryId::D3 => 1.0,
    };
    for steps in 1..=MAX_EXIT_STEPS {
        let v0 = w.v();
        let hit = w.advance(dt, rng, &mut |_| {})?;
        let u = rng.uniform();
        if let Some(hit) = hit {
            return Ok(ExitSample {
                boundary: hit.boundary,
                phi_exit: boundary_phi(hit.boundary),
                phi_last: hit.phi_overshoot,
                steps,
            });
        }
        let (v1, l) = (w.v(), shape.length(w.cylinder()));
        let p_top = (-(l - v0).max(0.0) * (l - v1).max(0.0) / dt).exp();
        let p_bottom = (-v0.max(0.0) * v1.max(0.0) / dt).exp();
        let boundary = if u < p_top {
            Some(w.cylinder().upper_boundary())
        } else if u < p_top + p_bottom {
            Some(BoundaryId::D3)
        } else {
            None
        };
        if let Some(boundary) = boundary {
            return Ok(ExitSample {
                boundary,
                phi_exit: boundary_phi(boundary),
                phi_last: w.phi(),
                steps,
            });
        }
    }
    Err(Error::MaxEventsExceeded {
        max_events: MAX_EXIT_STEPS as usize,
    })
}

/// Ensemble summary of [`exit_problem`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExitStudy {
    pub n_paths: u64,
    pub dt: f64,
    pub phi_start: f64,
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_d3: f64,
    pub mean_phi_exit: f64,
    pub se_phi_exit: f64,
    /// Mean of `phi_exit - phi_last`. Since `phi` of the discrete walker is an
    /// exact martingale, this estimates the discretisation bias
    /// `E[phi_exit] - phi_start` with far smaller variance.
    pub bias: f64,
    pub se_bias: f64,
    pub mean_steps: f64,
}

fn mean_se(values: impl Iterator<Item = f64> + Clone, n: f64) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `n_paths` exit paths from `start`, path `i` drawing from stream `(seed, i)`.
pub fn exit_study(shape: &PantsShape, start: ChartPoint, dt: f64, n_paths: u64, seed: u64) -> Result<ExitStudy> {
    if n_paths < 2 {
        return Err(Error::InvalidConfig("an exit study needs at least two paths".into()));
    }
    let samples = map_paths(n_paths, |i| exit_problem(shape, start, dt, 1e-6, &mut PathRng::new(seed, i)))?;
    let n = n_paths as f64;
    let frac = |b: BoundaryId| samples.iter().filter(|s| s.boundary == b).count() as f64 / n;
    let (mean_phi_exit, se_phi_exit) = mean_se(samples.iter().map(|s| s.phi_exit), n);
    let (bias, se_bias) = mean_se(samples.iter().map(|s| s.phi_exit - s.phi_last), n);
    Ok(ExitStudy {
        n_paths,
        dt,
        phi_start: harmonic_phi(shape, &start),
        p_d1: frac(BoundaryId::D1),
        p_d2: frac(BoundaryId::D2),
        p_d3: frac(BoundaryId::D3),
        mean_phi_exit,
        se_phi_exit,
        bias,
        se_bias,
        mean_steps: samples.iter().map(|s| s.steps as f64).sum::<f64>() / n,
    })
}
