use serde::Serialize;

use super::gfunction::{validate_g, GFunction};
use super::measure::{tv, CircleMeasure};
use crate::error::{Error, Result};

/// One application of the adjoint of `(Lf)(z) = sum_{Tw = z} f(w) / g(w)`.
///
/// Arc `I_j` maps under `T` onto arcs `2j` and `2j + 1` (mod `2^k`); the half
/// of `I_j` over arc `a` contributes `mu(a) / g(midpoint of that half)`. The
/// result is renormalised to unit mass.
pub fn transfer_dual_step(mu: &CircleMeasure, g: &GFunction) -> Result<CircleMeasure> {
    validate_g(g, mu.level())?;
    let inv_g = half_arc_weights(g, mu.level());
    let mut out = vec![0.0; mu.len()];
    dual_step_into(mu.weights(), &inv_g, &mut out);
    Ok(CircleMeasure::new(mu.level(), out).expect("dual step preserves probability"))
}

/// `1/g` at the midpoints of the two halves of every arc, laid out as
/// `[j][b]` -> `2j + b`.
fn half_arc_weights(g: &GFunction, level: u32) -> Vec<f64> {
    let n = 1usize << level;
    (0..2 * n)
        .map(|i| {
            let (j, b) = (i / 2, i % 2);
            g.inv((j as f64 + (2 * b + 1) as f64 / 4.0) / n as f64)
        })
        .collect()
}

fn dual_step_into(mu: &[f64], inv_g: &[f64], out: &mut [f64]) {
    let n = mu.len();
    let mask = n - 1;
    for (j, o) in out.iter_mut().enumerate() {
        let a0 = (2 * j) & mask;
        *o = mu[a0] * inv_g[2 * j] + mu[a0 + 1] * inv_g[2 * j + 1];
    }
    let total: f64 = out.iter().sum();
    if total != 1.0 {
        out.iter_mut().for_each(|w| *w /= total);
    }
}

/// A computed g-measure together with its convergence record.
#[derive(Clone, Debug, Serialize)]
pub struct GMeasure {
    pub measure: CircleMeasure,
    pub iterations: usize,
    /// Total variation between the last two iterates.
    pub residual: f64,
    /// Total variation after every iteration.
    pub history: Vec<f64>,
}

/// Power iteration of [`transfer_dual_step`] from Lebesgue measure until the
/// total-variation step is at most `tol`.
pub fn compute_g_measure(g: &GFunction, level: u32, tol: f64, max_iter: usize) -> Result<GMeasure> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    validate_g(g, level)?;
    let inv_g = half_arc_weights(g, level);
    let n = 1usize << level;
    let mut prev = vec![1.0 / n as f64; n];
    let mut cur = prev.clone();
    let mut next = vec![0.0; n];
    let mut history = Vec::new();
    for it in 1..=max_iter {
        dual_step_into(&cur, &inv_g, &mut next);
        let step = tv(&next, &cur);
        let lag2 = tv(&next, &prev);
        history.push(step);
        if step <= tol {
            return Ok(GMeasure {
                measure: CircleMeasure::normalized(level, next)?,
                iterations: it,
                residual: step,
                history,
            });
        }
        // a persistent period-2 cycle: successive steps stay flat while the
        // lag-2 distance has already collapsed
        if it > 2 && lag2 <= tol && step >= 0.99 * history[it - 3] {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: step,
                oscillating: true,
            });
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
        oscillating: false,
    })
}

/// `max_B |mu(TB) - int_B g dmu|` over the dyadic arcs `B` of `arc_level`,
/// the integral taken by the midpoint rule on `mu`'s grid.
pub fn radon_nikodym_check(mu: &CircleMeasure, g: &GFunction, arc_level: u32) -> Result<f64> {
    if arc_level < 2 {
        return Err(Error::ArcTooCoarse { level: arc_level });
    }
    if arc_level + 2 > mu.level() {
        return Err(Error::ArcTooFine {
            arc_level,
            measure_level: mu.level(),
        });
    }
    let per_arc = 1usize << (mu.level() - arc_level);
    let n_arcs = 1usize << arc_level;
    let half = n_arcs / 2;
    let w = mu.weights();
    let mut worst = 0.0f64;
    for b in 0..n_arcs {
        let image = mu.arc_mass((b % half) * 2 * per_arc, 2 * per_arc);
        let integral: f64 = (b * per_arc..(b + 1) * per_arc).map(|j| cell_integral(g, w, j)).sum();
        worst = worst.max((image - integral).abs());
    }
    Ok(worst)
}

/// `int g dmu` over cell `j` for the density that is linear across the cell
/// with the centred slope of the neighbouring cell masses (two-point Gauss).
fn cell_integral(g: &GFunction, w: &[f64], j: usize) -> f64 {
    let n = w.len();
    let h = 1.0 / n as f64;
    let slope = (w[(j + 1) % n] - w[(j + n - 1) % n]) / (2.0 * h * h);
    let dens = w[j] / h;
    let off = h / (2.0 * 3f64.sqrt());
    let m = (j as f64 + 0.5) * h;
    0.5 * h * (g.eval(m - off) * (dens - slope * off) + g.eval(m + off) * (dens + slope * off))
}
