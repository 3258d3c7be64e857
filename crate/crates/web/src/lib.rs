//! wasm-bindgen bindings for the browser demo in `www/`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use hirsch_core::circle_dynamics::compute_g_measure;
use hirsch_core::diffusion::{simulate_path, DiffusionConfig};
use hirsch_core::harmonic_measures::{stationarity_test, HarmonicMeasure};
use hirsch_core::{ChartPoint, CircleAngle, CircleMeasure, Cylinder, FoliatedPoint, GFunction, MetricFamily};

fn js_err(e: hirsch_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Density (w.r.t. Lebesgue) of the g-measure of `g = 2 / (1 + a sin 2 pi x)`
/// on the `2^level` dyadic arcs.
#[wasm_bindgen]
pub fn g_measure_density(a: f64, level: u32) -> Result<Vec<f64>, JsError> {
    let g = GFunction::sine(a).map_err(js_err)?;
    let r = compute_g_measure(&g, level, 1e-12, 100_000).map_err(js_err)?;
    Ok(r.measure.density())
}

/// One leafwise path from `z`, as flat rows `t, label, cylinder (1|2), u, v`.
#[wasm_bindgen]
pub fn leaf_path(a: f64, z: f64, t_end: f64, dt: f64, seed: u64) -> Result<Vec<f64>, JsError> {
    let fam = MetricFamily::new(GFunction::sine(a).map_err(js_err)?, None).map_err(js_err)?;
    let z = CircleAngle::from_turns(z.rem_euclid(1.0));
    let shape = fam.pants_shape_at(z).map_err(js_err)?;
    let start = FoliatedPoint::new(z, ChartPoint::cyl(Cylinder::C1, 0.5, 0.5 * shape.l1()));
    let cfg = DiffusionConfig::new(dt, t_end, seed).map_err(js_err)?;
    let traj = simulate_path(&fam, start, &cfg, 0).map_err(js_err)?;
    let mut rows = Vec::with_capacity(5 * traj.samples.len());
    for s in &traj.samples {
        let p = s.point.canonical();
        if let ChartPoint::Cyl { cyl, u, v } = p.p {
            let c = if cyl == Cylinder::C1 { 1.0 } else { 2.0 };
            rows.extend_from_slice(&[s.t, p.label().turns(), c, u, v]);
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct DemoReport {
    measure: &'static str,
    ks_statistic: f64,
    ks_threshold: f64,
    wasserstein1: f64,
    bootstrap_band: f64,
    pass: bool,
}

/// A small stationarity run for SINE(a) with either its g-measure or Lebesgue
/// measure; returns the report as JSON.
#[wasm_bindgen]
pub fn stationarity_demo(a: f64, use_g_measure: bool, n_paths: u32, t_end: f64, seed: u64) -> Result<String, JsError> {
    let fam = MetricFamily::new(GFunction::sine(a).map_err(js_err)?, None).map_err(js_err)?;
    let mu = if use_g_measure {
        compute_g_measure(fam.g(), 10, 1e-12, 100_000).map_err(js_err)?.measure
    } else {
        CircleMeasure::uniform(10)
    };
    let hm = HarmonicMeasure::new(fam, mu).map_err(js_err)?;
    let cfg = DiffusionConfig::new(1e-2, t_end, seed).map_err(js_err)?;
    let r = stationarity_test(&hm, &cfg, u64::from(n_paths), 0.01, 50).map_err(js_err)?;
    let report = DemoReport {
        measure: if use_g_measure { "g-measure" } else { "Lebesgue" },
        ks_statistic: r.ks_statistic,
        ks_threshold: r.ks_threshold,
        wasserstein1: r.wasserstein1,
        bootstrap_band: r.bootstrap_band,
        pass: r.pass,
    };
    serde_json::to_string(&report).map_err(|e| JsError::new(&e.to_string()))
}
