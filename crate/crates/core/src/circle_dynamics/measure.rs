use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability measure.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability measure on the circle, piecewise uniform on the `2^level`
/// dyadic arcs: `weights[j] = mu([j / 2^level, (j + 1) / 2^level))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct CircleMeasure {
    level: u32,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMeasure {
    level: u32,
    weights: Vec<f64>,
}

impl TryFrom<RawMeasure> for CircleMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        Self::new(raw.level, raw.weights)
    }
}

impl CircleMeasure {
    pub fn new(level: u32, weights: Vec<f64>) -> Result<Self> {
        if !(1..=26).contains(&level) {
            return Err(Error::InvalidMeasure(format!("level {level} outside 1..=26")));
        }
        if weights.len() != 1 << level {
            return Err(Error::InvalidMeasure(format!(
                "level {level} needs {} weights, got {}",
                1usize << level,
                weights.len()
            )));
        }
        if let Some((j, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("weight {j} is {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { level, weights })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn normalized(level: u32, mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidMeasure(format!("cannot normalise total mass {total}")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(level, weights)
    }

    /// Lebesgue measure.
    pub fn uniform(level: u32) -> Self {
        let n = 1usize << level;
        Self {
            level,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn arc_width(&self) -> f64 {
        1.0 / self.weights.len() as f64
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.arc_width()
    }

    /// Density with respect to Lebesgue measure on each arc.
    pub fn density(&self) -> Vec<f64> {
        let n = self.weights.len() as f64;
        self.weights.iter().map(|w| w * n).collect()
    }

    /// Splits every arc evenly into `2^(level - self.level)` sub-arcs.
    pub fn refined(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::InvalidMeasure(format!("cannot refine level {} to {level}", self.level)));
        }
        let k = 1usize << (level - self.level);
        let weights = self
            .weights
            .iter()
            .flat_map(|w| std::iter::repeat_n(w / k as f64, k))
            .collect();
        Ok(Self { level, weights })
    }

    /// Aggregates arcs to the coarser `level`.
    pub fn coarsened(&self, level: u32) -> Result<Self> {
        if level > self.level || level == 0 {
            return Err(Error::InvalidMeasure(format!("cannot coarsen level {} to {level}", self.level)));
        }
        let k = 1usize << (self.level - level);
        let weights = self.weights.chunks(k).map(|c| c.iter().sum()).collect();
        Ok(Self { level, weights })
    }

    /// Total variation distance `(1/2) sum |a_j - b_j|` at a common level.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.level != other.level {
            return Err(Error::InvalidMeasure(format!(
                "total variation needs equal levels, got {} and {}",
                self.level, other.level
            )));
        }
        Ok(tv(&self.weights, &other.weights))
    }

    /// Mass of the arc `[start, start + len)` in units of this measure's arcs
    /// (wrapping around the circle).
    pub fn arc_mass(&self, start: usize, len: usize) -> f64 {
        let n = self.weights.len();
        (0..len).map(|i| self.weights[(start + i) % n]).sum()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("measure serialisation cannot fail")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

pub(crate) fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
