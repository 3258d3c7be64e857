//! One-dimensional goodness-of-fit statistics on `[0, 1)` against piecewise
//! linear CDFs (densities constant on dyadic arcs).

use crate::circle_dynamics::CircleMeasure;
use crate::error::{Error, Result};

/// CDF of a density that is constant on each of `n` equal cells of `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseCdf {
    weights: Vec<f64>,
    /// `cumulative[j] = F(j / n)`, length `n + 1`.
    cumulative: Vec<f64>,
}

impl PiecewiseCdf {
    /// Normalises nonnegative cell weights.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || !(total > 0.0) || !total.is_finite() || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidMeasure("cell weights must be nonnegative with positive sum".into()));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut cumulative = Vec::with_capacity(weights.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        *cumulative.last_mut().expect("nonempty") = 1.0;
        Ok(Self { weights, cumulative })
    }

    pub fn from_measure(mu: &CircleMeasure) -> Self {
        Self::new(mu.weights().to_vec()).expect("probability measures have positive mass")
    }

    pub fn uniform() -> Self {
        Self::new(vec![1.0]).expect("one unit cell")
    }

    pub fn cells(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let n = self.weights.len();
        let s = x * n as f64;
        let j = (s as usize).min(n - 1);
        self.cumulative[j] + self.weights[j] * (s - j as f64)
    }

    /// Smallest `x` with `F(x) = p`, for `p` in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.weights.len();
        // first cell whose upper cumulative exceeds p
        let j = self.cumulative[1..].partition_point(|c| *c <= p).min(n - 1);
        let w = self.weights[j];
        let frac = if w > 0.0 { ((p - self.cumulative[j]) / w).clamp(0.0, 1.0) } else { 0.0 };
        let x = (j as f64 + frac) / n as f64;
        x.min(1.0 - f64::EPSILON / 2.0)
    }

    /// Refines to `m` cells (`m` a multiple of the current cell count).
    pub fn refined(&self, m: usize) -> Self {
        let n = self.weights.len();
        assert!(m.is_multiple_of(n), "refinement must split cells evenly");
        let k = m / n;
        Self::new(self.weights.iter().flat_map(|w| std::iter::repeat_n(w / k as f64, k)).collect())
            .expect("refinement preserves mass")
    }
}

/// `int |d(x)|` over an interval of width `h` on which `d` is linear from `d0`
/// to `d1`.
fn abs_linear_integral(h: f64, d0: f64, d1: f64) -> f64 {
    if d0 * d1 >= 0.0 {
        0.5 * h * (d0.abs() + d1.abs())
    } else {
        0.5 * h * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs())
    }
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `sorted` and `f`.
pub fn ks_one_sample(sorted: &[f64], f: &PiecewiseCdf) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let fx = f.cdf(x);
            ((i as f64 + 1.0) / n - fx).max(fx - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value `sqrt(-ln(alpha / 2) / 2) / sqrt(n)` of the
/// one-sample KS statistic.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// `W1 = int_0^1 |F_n - F|` between the empirical CDF of `sorted` (values in
/// `[0, 1)`) and `f`, exactly.
pub fn w1_to_cdf(sorted: &[f64], f: &PiecewiseCdf) -> f64 {
    let m = sorted.len();
    let n = f.cells();
    let (mut i, mut j) = (0usize, 1usize);
    let mut x = 0.0;
    let mut total = 0.0;
    while j <= n {
        let node = j as f64 / n as f64;
        let next = if i < m && sorted[i] < node { sorted[i] } else { node };
        let c = i as f64 / m as f64;
        total += abs_linear_integral(next - x, f.cdf(x) - c, f.cdf(next) - c);
        x = next;
        if i < m && sorted[i] < node {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

/// `W1 = int_0^1 |F_a - F_b|` between two piecewise linear CDFs on the same
/// cells, exactly.
pub fn w1_between(a: &PiecewiseCdf, b: &PiecewiseCdf) -> Result<f64> {
    if a.cells() != b.cells() {
        return Err(Error::InvalidMeasure(format!(
            "W1 needs a common grid, got {} and {} cells",
            a.cells(),
            b.cells()
        )));
    }
    let h = 1.0 / a.cells() as f64;
    Ok((0..a.cells())
        .map(|j| {
            abs_linear_integral(
                h,
                a.cumulative[j] - b.cumulative[j],
                a.cumulative[j + 1] - b.cumulative[j + 1],
            )
        })
        .sum())
}

/// The `ceil(q B)`-th smallest of `values` (an empirical `q`-quantile).
pub fn upper_quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = ((q * values.len() as f64).ceil() as usize).clamp(1, values.len());
    values[k - 1]
}
