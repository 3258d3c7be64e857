//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::LN_2;
use std::process::Command;
use std::time::{Duration, Instant};

use hirsch_core::circle_dynamics::{compute_g_measure, radon_nikodym_check};
use hirsch_core::diffusion::exit_study;
use hirsch_core::foliation::{cross_inward, cross_outward, same_on_d3};
use hirsch_core::harmonic_measures::{distinctness_test, fiber_mass, HarmonicMeasure};
use hirsch_core::pants_geometry::{
    area, collar_circle_length, collar_curvature_audit, gauss_bonnet_audit, gauss_bonnet_quadrature, laplace_residual,
    phi_mass_quadrature, slit_crossing, SlitSide,
};
use hirsch_core::{BoundaryId, ChartPoint, CircleAngle, CircleMeasure, Cylinder, GFunction, MetricFamily, PantsShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    elapsed: Duration,
}

fn hirsch(args: &[&str]) -> Run {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hirsch"))
        .args(args)
        .output()
        .expect("the hirsch binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        elapsed: t.elapsed(),
    }
}

fn json(run: &Run) -> serde_json::Value {
    serde_json::from_str(&run.stdout).unwrap_or(serde_json::Value::Null)
}

fn criterion_1() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("mu.json");
    let run = hirsch(&["gmeasure", "--g", "const2", "--level", "12", "--out", path.to_str().unwrap()]);
    let Ok(mu) = CircleMeasure::read(&path) else {
        return outcome(false, format!("exit {}, no measure written: {}", run.code, run.stderr));
    };
    let exact = mu == CircleMeasure::uniform(12);
    let dev = json(&run)["result"]["max_deviation_from_uniform"].as_f64();
    outcome(
        run.code == 0 && exact && dev == Some(0.0) && run.elapsed < Duration::from_secs(1),
        format!("exit {}, exact uniform {exact}, deviation {dev:?}, {:.2?}", run.code, run.elapsed),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let g = GFunction::sine(0.3).expect("valid g");
    let mu12 = compute_g_measure(&g, 12, 1e-13, 100_000).expect("converges").measure;
    let rn = radon_nikodym_check(&mu12, &g, 8).expect("arc level 8");
    let mu10 = compute_g_measure(&g, 10, 1e-13, 100_000).expect("converges").measure;
    let oracle = common::dense_fixed_point(&common::dense_adjoint(10, common::sine_inv_g(0.3)));
    let tv: f64 = mu10.weights().iter().zip(oracle.iter()).map(|(a, b)| (a - b).abs()).sum();
    let elapsed = t.elapsed();
    outcome(
        rn <= 1e-6 && tv <= 1e-8 && elapsed < Duration::from_secs(10),
        format!("RN residual {rn:.3e}, dense-oracle TV {tv:.3e}, {elapsed:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (l1, l2) in [(LN_2, LN_2), (3f64.ln(), 1.5f64.ln())] {
        let shape = PantsShape::new(l1, l2, 0.5 * l1.min(l2)).expect("valid shape");
        let a = (area(&shape, 256) - 1.0).abs();
        let closed = l1 * (-l1).exp() + l2 * (-l2).exp();
        let m = (phi_mass_quadrature(&shape, 256) - closed).abs();
        let gb = gauss_bonnet_audit(&shape);
        let gbq = gauss_bonnet_quadrature(&shape, 256);
        pass &= a <= 1e-6 && m <= 1e-8 && gb <= 1e-10 && gbq <= 1e-4;
        detail.push(format!("({l1:.4},{l2:.4}): area {a:.1e}, mass {m:.1e}, GB {gb:.1e}/{gbq:.1e}"));
    }
    let fam = MetricFamily::new(GFunction::sine(0.3).expect("valid g"), None).expect("valid family");
    let z = CircleAngle::from_turns(0.2);
    let m = (phi_mass_quadrature(&fam.pants_shape_at(z).expect("shape"), 256) - fiber_mass(&fam, z)).abs();
    pass &= m <= 1e-8;
    detail.push(format!("fiber mass {m:.1e}"));
    outcome(pass, detail.join("; "))
}

fn criterion_4() -> Outcome {
    let shape = PantsShape::new(LN_2, LN_2, 0.5 * LN_2).expect("valid shape");
    let r = [32.0, 64.0, 128.0].map(|n| laplace_residual(&shape, 1.0 / n));
    let ratios = [r[0] / r[1], r[1] / r[2]];
    let order_ok = ratios.iter().all(|q| (q / 4.0 - 1.0).abs() <= 0.2);
    let k = collar_curvature_audit(100);
    let len = (collar_circle_length(1.0, 64) - 1.0).abs();
    outcome(
        order_ok && k <= 1e-6 && len <= 1e-10,
        format!("Laplace ratios {:.3}, {:.3}; max |K+1| {k:.1e}; |len - 1| {len:.1e}", ratios[0], ratios[1]),
    )
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let shape = PantsShape::new(LN_2, LN_2, 0.5 * LN_2).expect("valid shape");
    let start = ChartPoint::cyl(Cylinder::C1, 0.5, 0.5 * LN_2);
    let (Ok(a), Ok(b)) = (exit_study(&shape, start, 1e-3, 100_000, 2024), exit_study(&shape, start, 5e-4, 100_000, 2025))
    else {
        return outcome(false, "exit study failed");
    };
    let z = (a.mean_phi_exit - a.phi_start).abs() / a.se_phi_exit;
    let ratio = b.bias / a.bias;
    let elapsed = t.elapsed();
    outcome(
        z <= 3.0 && (0.25..=0.75).contains(&ratio) && elapsed < Duration::from_secs(300),
        format!(
            "|mean - phi0| = {z:.2} SE, bias {:.2e} -> {:.2e} (ratio {ratio:.2}), P(D3) {:.4}, {elapsed:.2?}",
            a.bias, b.bias, a.p_d3
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // angles with free low bits, as produced from f64 turns
    let mut angle = || CircleAngle::from_raw(rng.random::<u128>() & !0xff);
    let mut bad = 0usize;
    for k in 0..10_000 {
        let (z, theta) = (angle(), angle());
        let (z2, b, t2) = cross_outward(z, theta);
        bad += usize::from(!cross_inward(z2, b, t2).is_ok_and(|back| same_on_d3(back, (z, theta))));
        let boundary = if k % 2 == 0 { BoundaryId::D1 } else { BoundaryId::D2 };
        let (w, t) = cross_inward(z, boundary, theta).expect("inward boundary");
        let expect_z = if boundary == BoundaryId::D1 { z } else { z.antipode() };
        bad += usize::from(cross_outward(w, t) != (expect_z, BoundaryId::D1, theta));
    }
    let shape = PantsShape::new(3f64.ln(), 1.5f64.ln(), 0.2).expect("valid shape");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let v = rng.random::<f64>() * shape.eps();
        let cyl = if rng.random::<bool>() { Cylinder::C1 } else { Cylinder::C2 };
        let side = if rng.random::<bool>() { SlitSide::Left } else { SlitSide::Right };
        let there = slit_crossing(&shape, cyl, side, v).expect("on the slit");
        let back = slit_crossing(&shape, there.cyl, there.side, there.v).expect("on the slit");
        bad += usize::from((back.cyl, back.side, back.v) != (cyl, side, v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut angle = || CircleAngle::from_raw(rng.random::<u128>() & !0xff);
    let mut broken = 0usize;
    for _ in 0..10_000 {
        let (z, theta) = (angle(), angle());
        broken += usize::from(cross_outward(z.antipode(), theta.antipode()) != cross_outward(z, theta));
        broken += usize::from(
            cross_inward(z, BoundaryId::D1, theta).ok() != cross_inward(z.antipode(), BoundaryId::D2, theta).ok(),
        );
    }
    outcome(
        bad == 0 && broken == 0,
        format!("{bad} round-trip failures, {broken} equivariance failures over 10^4 draws each"),
    )
}

fn stationarity(g: &str, mu: &str, extra: &[&str]) -> Run {
    let mut args = vec![
        "stationarity", "--g", g, "--mu", mu, "--paths", "100000", "--t-end", "5", "--seed", "42", "--alpha", "0.01",
    ];
    args.extend_from_slice(extra);
    hirsch(&args)
}

fn summary(run: &Run) -> String {
    let r = &json(run)["result"];
    format!(
        "exit {}, KS {:.4}/{:.4}, W1 {:.5}/{:.5}, {:.1?}",
        run.code,
        r["ks_statistic"].as_f64().unwrap_or(f64::NAN),
        r["ks_threshold"].as_f64().unwrap_or(f64::NAN),
        r["wasserstein1"].as_f64().unwrap_or(f64::NAN),
        r["bootstrap_band"].as_f64().unwrap_or(f64::NAN),
        run.elapsed
    )
}

fn criterion_7() -> Outcome {
    let limit = Duration::from_secs(15 * 60);
    let a = stationarity("const2", "uniform:12", &[]);
    let b = stationarity("sine:a=0.3", "gmeasure:12", &[]);
    outcome(
        a.code == 0 && b.code == 0 && a.elapsed < limit && b.elapsed < limit,
        format!("(const2, Lebesgue): {}; (SINE(0.3), g-measure): {}", summary(&a), summary(&b)),
    )
}

fn criterion_8() -> Outcome {
    let neg = stationarity("sine:a=0.3", "uniform:12", &[]);
    let fam = MetricFamily::new(GFunction::sine(0.3).expect("valid g"), None).expect("valid family");
    let lebesgue = HarmonicMeasure::new(fam.clone(), CircleMeasure::uniform(10)).expect("valid measure");
    let mut w = vec![1.0; 1024];
    w[300] = 400.0;
    let heavy = HarmonicMeasure::new(fam, CircleMeasure::normalized(10, w).expect("positive mass")).expect("valid");
    let d = distinctness_test(&lebesgue, &heavy).unwrap_or(f64::NAN);
    let oracle = common::quantile_transport_w1(lebesgue.marginal().weights(), heavy.marginal().weights());
    outcome(
        neg.code == 5 && d > 0.0 && (d - oracle).abs() <= 1e-10,
        format!("negative control: {}; W1 {d:.6e} vs oracle {oracle:.6e}", summary(&neg)),
    )
}

fn criterion_9() -> Outcome {
    let commands: [&[&str]; 3] = [
        &["stationarity", "--g", "sine:a=0.3", "--mu", "gmeasure:10", "--paths", "3000", "--t-end", "1", "--seed", "9"],
        &["simulate", "--g", "sine:a=0.3", "--z", "0.1", "--t-end", "2", "--seed", "9", "--paths", "500"],
        &["simulate", "--L1", "0.693147", "--L2", "0.693147", "--exit", "--paths", "5000", "--seed", "9"],
    ];
    let mut mismatches = Vec::new();
    for cmd in commands {
        let runs: Vec<Run> = ["1", "8", "8"]
            .iter()
            .map(|t| hirsch(&[&["--threads", t][..], cmd].concat()))
            .collect();
        let ok = runs.iter().all(|r| r.code == 0 && r.stdout == runs[0].stdout && !r.stdout.is_empty());
        if !ok {
            mismatches.push(cmd[0].to_string() + " " + cmd[1]);
        }
    }
    outcome(mismatches.is_empty(), format!("3 commands x (1, 8, 8 threads); mismatches: {mismatches:?}"))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failures = 0;
    for (n, check) in criteria {
        let o = check();
        println!("[criterion {n}] {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.pass);
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
