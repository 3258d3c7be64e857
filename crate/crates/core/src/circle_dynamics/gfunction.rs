use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible deviation from `1/g(z) + 1/g(-z) = 1`.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// A continuous `g: S^1 -> (1, inf)` with `1/g(z) + 1/g(-z) = 1`.
///
/// The tabulated family stores the node values `g(j/n)` and interpolates
/// `1/g` piecewise-linearly; interpolating the reciprocal keeps the identity
/// exact between nodes whenever it holds at the nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GFunction {
    /// `g = 2`; Lebesgue measure is its g-measure.
    Constant2,
    /// `g(theta) = 2 / (1 + a sin(2 pi theta))`, `|a| < 1`.
    Sine { a: f64 },
    /// Node values at `theta = j / n`, `n` a power of two.
    Tabulated { values: Vec<f64> },
}

#[derive(Debug, Deserialize)]
struct TableFile {
    values: Vec<f64>,
}

/// Outcome of [`validate_g`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GValidation {
    pub grid_level: u32,
    pub min_g: f64,
    pub inf_log_g: f64,
    pub max_identity_residual: f64,
}

impl GFunction {
    pub fn sine(a: f64) -> Result<Self> {
        if !(a.abs() < 1.0) {
            return Err(Error::InvalidSpec(format!("sine amplitude must satisfy |a| < 1, got {a}")));
        }
        Ok(Self::Sine { a })
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "tabulated g needs a power-of-two number (>= 2) of values, got {n}"
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("tabulated g has non-finite value {v}")));
        }
        Ok(Self::Tabulated { values })
    }

    /// Reads `{"values": [...]}`.
    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let table: TableFile = serde_json::from_str(&text)?;
        Self::tabulated(table.values)
    }

    /// Parses `const2`, `sine:a=0.3` or `table:<path>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, rest) = match spec.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r)),
            None => (spec, None),
        };
        match (kind, rest) {
            ("const2", None) => Ok(Self::Constant2),
            ("sine", Some(params)) => {
                let mut a = None;
                for kv in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match kv.split_once('=') {
                        Some(("a", v)) => a = Some(parse_real(v)?),
                        _ => return Err(Error::InvalidSpec(format!("unknown sine parameter `{kv}`"))),
                    }
                }
                Self::sine(a.ok_or_else(|| Error::InvalidSpec("sine needs a=<amplitude>".into()))?)
            }
            ("table", Some(path)) if !path.is_empty() => Self::from_table_file(path),
            _ => Err(Error::InvalidSpec(format!(
                "unrecognised g-function `{spec}` (expected const2, sine:a=<a> or table:<path>)"
            ))),
        }
    }

    /// The canonical spec string.
    pub fn spec(&self) -> String {
        match self {
            Self::Constant2 => "const2".into(),
            Self::Sine { a } => format!("sine:a={a}"),
            Self::Tabulated { values } => format!("table:<{} values>", values.len()),
        }
    }

    /// `1/g(theta)`: the probability weight of the inverse branch through `theta`.
    pub fn inv(&self, theta: f64) -> f64 {
        match self {
            Self::Constant2 => 0.5,
            Self::Sine { a } => 0.5 * (1.0 + a * (std::f64::consts::TAU * theta).sin()),
            Self::Tabulated { values } => {
                let n = values.len();
                let x = theta.rem_euclid(1.0) * n as f64;
                let i = (x.floor() as usize).min(n - 1);
                let frac = x - i as f64;
                let lo = 1.0 / values[i];
                let hi = 1.0 / values[(i + 1) % n];
                lo + frac * (hi - lo)
            }
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            Self::Constant2 => 2.0,
            Self::Tabulated { values } if is_node(theta, values.len()) => {
                values[(theta.rem_euclid(1.0) * values.len() as f64).round() as usize % values.len()]
            }
            _ => 1.0 / self.inv(theta),
        }
    }

    /// `log g(theta)`, the cylinder length `L1` of the pants over `theta`.
    pub fn log_g(&self, theta: f64) -> f64 {
        match self {
            Self::Constant2 => std::f64::consts::LN_2,
            _ => -self.inv(theta).ln(),
        }
    }

    /// Level of the grid on which validation is meaningful: the table's own
    /// nodes for tabulated functions, `default_level` otherwise.
    pub fn native_level(&self, default_level: u32) -> u32 {
        match self {
            Self::Tabulated { values } => values.len().trailing_zeros(),
            _ => default_level,
        }
    }
}

fn is_node(theta: f64, n: usize) -> bool {
    let x = theta.rem_euclid(1.0) * n as f64;
    x == x.round()
}

fn parse_real(v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|e| Error::InvalidSpec(format!("bad number `{v}`: {e}")))
}

/// Checks `g > 1` and the identity on the dyadic grid of `grid_level` (the
/// node grid for tabulated functions) and reports `inf log g`.
pub fn validate_g(g: &GFunction, grid_level: u32) -> Result<GValidation> {
    if grid_level == 0 || grid_level > 26 {
        return Err(Error::InvalidConfig(format!("grid level {grid_level} outside 1..=26")));
    }
    if let GFunction::Sine { a } = g {
        if !(a.abs() < 1.0) {
            return Err(Error::InvalidSpec(format!("sine amplitude must satisfy |a| < 1, got {a}")));
        }
    }
    let level = g.native_level(grid_level);
    let n = 1usize << level;
    let mut min_g = f64::INFINITY;
    let mut max_res = 0.0f64;
    for j in 0..n {
        let theta = j as f64 / n as f64;
        let v = g.eval(theta);
        if !(v > 1.0) {
            return Err(Error::NotGreaterThanOne { theta, value: v });
        }
        min_g = min_g.min(v);
    }
    for j in 0..n / 2 {
        let theta = j as f64 / n as f64;
        let res = (1.0 / g.eval(theta) + 1.0 / g.eval(theta + 0.5) - 1.0).abs();
        if res > IDENTITY_TOLERANCE {
            return Err(Error::IdentityViolated { theta, residual: res });
        }
        max_res = max_res.max(res);
    }
    Ok(GValidation {
        grid_level: level,
        min_g,
        inf_log_g: min_g.ln(),
        max_identity_residual: max_res,
    })
}
