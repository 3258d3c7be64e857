//! The candidate harmonic measure `m = phi vol(ds^2_z) (x) mu`, its sampler,
//! and the stationarity and distinctness tests.
//!
//! `mu` is a measure on the leaf space, i.e. on the label `zeta = T(z)` of a
//! pants; the pants over `zeta` is described by either representative
//! `z = zeta / 2` or `zeta / 2 + 1/2`. On cylinder `C_i` the product
//! `phi * sqrt(det metric)` is `e^{-v} e^{v - L_i} = e^{-L_i}`, so the fibre
//! mass is `M = L1 e^{-L1} + L2 e^{-L2}` and `(u, v)` is uniform on each
//! cylinder.

use serde::Serialize;

use crate::circle_dynamics::{CircleAngle, CircleMeasure};
use crate::diffusion::{evolve, map_paths, DiffusionConfig, EventCounts, PathRng};
use crate::error::{Error, Result};
use crate::foliation::{FoliatedPoint, MetricFamily};
use crate::pants_geometry::{ChartPoint, Cylinder};
use crate::stats::{ks_critical, ks_one_sample, upper_quantile, w1_between, w1_to_cdf, PiecewiseCdf};

/// Stream ids at and above this are used by bootstrap replicates.
pub const BOOTSTRAP_STREAM_BASE: u64 = 1 << 63;

/// `int phi dvol` over the pants over `z`: `L1 e^{-L1} + L2 e^{-L2}`.
pub fn fiber_mass(fam: &MetricFamily, z: CircleAngle) -> f64 {
    let (l1, l2) = fam.lengths_at(z);
    l1 * (-l1).exp() + l2 * (-l2).exp()
}

#[derive(Clone, Debug)]
pub struct HarmonicMeasure {
    fam: MetricFamily,
    mu: CircleMeasure,
    marginal: PiecewiseCdf,
    z_norm: f64,
}

impl HarmonicMeasure {
    /// The transverse marginal has cell weights `mu_j M(zeta_j / 2) / Z`, with
    /// `zeta_j` the midpoint of arc `j`.
    pub fn new(fam: MetricFamily, mu: CircleMeasure) -> Result<Self> {
        let weights: Vec<f64> = (0..mu.len())
            .map(|j| mu.weights()[j] * fiber_mass(&fam, CircleAngle::from_turns(mu.midpoint(j)).halved()))
            .collect();
        let z_norm: f64 = weights.iter().sum();
        if !(z_norm > 0.0) {
            return Err(Error::InvalidMeasure("normalisation constant Z must be positive".into()));
        }
        let marginal = PiecewiseCdf::new(weights)?;
        Ok(Self {
            fam,
            mu,
            marginal,
            z_norm,
        })
    }

    pub fn fam(&self) -> &MetricFamily {
        &self.fam
    }

    pub fn mu(&self) -> &CircleMeasure {
        &self.mu
    }

    /// CDF of the leaf label under the normalised `m`.
    pub fn marginal(&self) -> &PiecewiseCdf {
        &self.marginal
    }

    /// `Z = int M dmu`.
    pub fn normalization(&self) -> f64 {
        self.z_norm
    }

    /// Draws a point of `m / |m|`, returned with `z` in `[0, 1/2)`.
    pub fn sample_point(&self, rng: &mut PathRng) -> FoliatedPoint {
        let label = CircleAngle::from_turns(self.marginal.quantile(rng.uniform()));
        let z = label.halved();
        let (l1, l2) = self.fam.lengths_at(z);
        let w1 = l1 * (-l1).exp();
        let w2 = l2 * (-l2).exp();
        let (cyl, l) = if rng.uniform() * (w1 + w2) < w1 {
            (Cylinder::C1, l1)
        } else {
            (Cylinder::C2, l2)
        };
        let u = rng.uniform();
        let v = l * rng.uniform();
        FoliatedPoint::new(z, ChartPoint::cyl(cyl, u, v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarityReport {
    pub n_paths: u64,
    pub t_end: f64,
    pub dt: f64,
    pub seed: u64,
    pub alpha: f64,
    /// KS distance of the evolved leaf labels to the initial marginal.
    pub ks_statistic: f64,
    pub ks_threshold: f64,
    pub wasserstein1: f64,
    /// `(1 - alpha)`-quantile of W1 for `n_paths` exact draws from the marginal.
    pub bootstrap_band: f64,
    pub bootstrap_replicates: usize,
    /// KS distance of `v / L_i` after evolution to the uniform law (reported,
    /// not part of the verdict).
    pub v_ks_statistic: f64,
    pub mean_d1_crossings: f64,
    pub mean_d2_crossings: f64,
    pub mean_d3_crossings: f64,
    pub mean_slit_crossings: f64,
    pub pass: bool,
}

/// Starts `n_paths` points from `hm`, evolves them to `cfg.t_end` and tests the
/// evolved leaf labels against the initial marginal at level `alpha`.
///
/// Path `i` draws its start and its increments from stream `(cfg.seed, i)`;
/// bootstrap replicate `b` uses stream `(cfg.seed, 2^63 + b)`.
pub fn stationarity_test(
    hm: &HarmonicMeasure,
    cfg: &DiffusionConfig,
    n_paths: u64,
    alpha: f64,
    bootstrap: usize,
) -> Result<StationarityReport> {
    cfg.validate()?;
    if n_paths == 0 {
        return Err(Error::InvalidConfig("stationarity needs at least one path".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if bootstrap == 0 {
        return Err(Error::InvalidConfig("the bootstrap needs at least one replicate".into()));
    }
    let finals = map_paths(n_paths, |i| {
        let mut rng = PathRng::new(cfg.seed, i);
        let start = hm.sample_point(&mut rng);
        let (end, counts) = evolve(&hm.fam, start, cfg, &mut rng)?;
        let ChartPoint::Cyl { cyl, v, .. } = end.p else {
            unreachable!("the walker reports cylinder charts")
        };
        let shape = hm.fam.pants_shape_at(end.z)?;
        Ok((end.label().turns(), v / shape.length(cyl), counts))
    })?;

    let mut labels: Vec<f64> = finals.iter().map(|f| f.0).collect();
    labels.sort_by(f64::total_cmp);
    let mut heights: Vec<f64> = finals.iter().map(|f| f.1.clamp(0.0, 1.0)).collect();
    heights.sort_by(f64::total_cmp);
    let mut counts = EventCounts::default();
    finals.iter().for_each(|f| counts.add(&f.2));

    let ks_statistic = ks_one_sample(&labels, &hm.marginal);
    let ks_threshold = ks_critical(labels.len(), alpha);
    let wasserstein1 = w1_to_cdf(&labels, &hm.marginal);
    let mut band = map_paths(bootstrap as u64, |b| {
        let mut rng = PathRng::new(cfg.seed, BOOTSTRAP_STREAM_BASE + b);
        let mut xs: Vec<f64> = (0..n_paths).map(|_| hm.marginal.quantile(rng.uniform())).collect();
        xs.sort_by(f64::total_cmp);
        Ok(w1_to_cdf(&xs, &hm.marginal))
    })?;
    let bootstrap_band = upper_quantile(&mut band, 1.0 - alpha);

    let n = n_paths as f64;
    Ok(StationarityReport {
        n_paths,
        t_end: cfg.t_end,
        dt: cfg.dt,
        seed: cfg.seed,
        alpha,
        ks_statistic,
        ks_threshold,
        wasserstein1,
        bootstrap_band,
        bootstrap_replicates: bootstrap,
        v_ks_statistic: ks_one_sample(&heights, &PiecewiseCdf::uniform()),
        mean_d1_crossings: counts.d1 as f64 / n,
        mean_d2_crossings: counts.d2 as f64 / n,
        mean_d3_crossings: counts.d3 as f64 / n,
        mean_slit_crossings: counts.slit as f64 / n,
        pass: ks_statistic <= ks_threshold && wasserstein1 <= bootstrap_band,
    })
}

/// W1 between the transverse marginals of `a` and `b`, on the finer of their
/// two grids.
pub fn distinctness_test(a: &HarmonicMeasure, b: &HarmonicMeasure) -> Result<f64> {
    if a.fam != b.fam {
        return Err(Error::FamilyMismatch);
    }
    let cells = a.marginal.cells().max(b.marginal.cells());
    w1_between(&a.marginal.refined(cells), &b.marginal.refined(cells))
}
