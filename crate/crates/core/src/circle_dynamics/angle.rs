use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

const TWO_POW_128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

/// A point `z = exp(2 pi i theta)` of the unit circle, stored as a 128-bit
/// fixed-point fraction of a turn.
///
/// Rotations, the antipodal involution and the doubling map are exact in this
/// representation. Halving (an inverse branch of the doubling map) drops the
/// lowest bit; angles built from `f64` or from [`CircleAngle::from_bits_u64`]
/// occupy only the upper 64 bits, so they survive 64 successive halvings
/// without loss.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "f64", from = "f64")]
pub struct CircleAngle(u128);

impl CircleAngle {
    pub const ZERO: Self = Self(0);
    pub const HALF: Self = Self(1 << 127);

    pub const fn from_raw(bits: u128) -> Self {
        Self(bits)
    }

    pub const fn raw(self) -> u128 {
        self.0
    }

    /// Angle with the given 64 most significant bits.
    pub const fn from_bits_u64(bits: u64) -> Self {
        Self((bits as u128) << 64)
    }

    /// Left endpoint of dyadic arc `index` at `level` (arc length `2^-level`).
    pub fn dyadic(index: u64, level: u32) -> Self {
        assert!((1..=64).contains(&level), "dyadic level out of range");
        let mask = if level == 64 { u64::MAX } else { (1u64 << level) - 1 };
        Self(((index & mask) as u128) << (128 - level))
    }

    /// Reduces `turns` mod 1. Exact for every `f64` in `[2^-75, 1)`.
    pub fn from_turns(turns: f64) -> Self {
        let t = turns.rem_euclid(1.0);
        if !(t < 1.0) {
            // rem_euclid rounds tiny negatives up to exactly 1.0
            return Self::ZERO;
        }
        Self((t * TWO_POW_128) as u128)
    }

    /// Nearest `f64` in `[0, 1)`.
    pub fn turns(self) -> f64 {
        let t = self.0 as f64 / TWO_POW_128;
        if t < 1.0 {
            t
        } else {
            f64::from_bits(1.0f64.to_bits() - 1)
        }
    }

    /// Index of the dyadic arc of the given level containing this angle.
    pub fn arc_index(self, level: u32) -> usize {
        assert!((1..=64).contains(&level), "dyadic level out of range");
        (self.0 >> (128 - level)) as usize
    }

    /// `T(z) = z^2`, i.e. `theta -> 2 theta mod 1`.
    pub fn doubled(self) -> Self {
        Self(self.0 << 1)
    }

    /// `i(z) = -z`, i.e. `theta -> theta + 1/2 mod 1`.
    pub fn antipode(self) -> Self {
        self + Self::HALF
    }

    /// Principal square root: `theta -> theta / 2` with `theta` in `[0, 1)`.
    pub fn halved(self) -> Self {
        Self(self.0 >> 1)
    }
}

pub fn doubling_map(theta: CircleAngle) -> CircleAngle {
    theta.doubled()
}

pub fn antipode(theta: CircleAngle) -> CircleAngle {
    theta.antipode()
}

/// Rotation, mod 1.
impl Add for CircleAngle {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self(self.0.wrapping_add(other.0))
    }
}

impl Sub for CircleAngle {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        Self(self.0.wrapping_sub(other.0))
    }
}

impl From<CircleAngle> for f64 {
    fn from(a: CircleAngle) -> f64 {
        a.turns()
    }
}

impl From<f64> for CircleAngle {
    fn from(t: f64) -> Self {
        Self::from_turns(t)
    }
}

impl fmt::Debug for CircleAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CircleAngle({:#034x} ~ {})", self.0, self.turns())
    }
}

impl fmt::Display for CircleAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.turns())
    }
}
