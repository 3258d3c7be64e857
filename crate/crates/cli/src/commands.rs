use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use hirsch_core::circle_dynamics::{compute_g_measure, radon_nikodym_check};
use hirsch_core::diffusion::{evolve, exit_study, map_paths, simulate_path, DiffusionConfig, EventCounts, PathRng};
use hirsch_core::harmonic_measures::{distinctness_test, stationarity_test, HarmonicMeasure};
use hirsch_core::pants_geometry::{audit_shape, laplace_residual};
use hirsch_core::report::{all_pass, failed};
use hirsch_core::{ChartPoint, CircleAngle, CircleMeasure, Cylinder, Error, FoliatedPoint, GFunction, MetricFamily, PantsShape};

use crate::{AuditArgs, DistinctArgs, GmeasureArgs, ShapeArgs, SimulateArgs, StationarityArgs};

/// Tolerance within which `--L1/--L2` are snapped onto `e^-L1 + e^-L2 = 1`.
const SNAP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Core(e) => match e {
                Error::NoConvergence { .. } => 3,
                Error::IdentityViolated { .. }
                | Error::NotGreaterThanOne { .. }
                | Error::ArcTooCoarse { .. }
                | Error::ArcTooFine { .. }
                | Error::InvalidShape(_)
                | Error::InvalidMeasure(_)
                | Error::InvalidSpec(_)
                | Error::InvalidConfig(_)
                | Error::FamilyMismatch
                | Error::SingularPoint
                | Error::AtConePoint
                | Error::Json(_) => 2,
                Error::StepUnderflow { .. } | Error::MaxEventsExceeded { .. } | Error::Io(_) => 1,
            },
        }
    }
}

type CmdResult = Result<u8, CliError>;

/// Failures while reading user-supplied files are input errors.
fn input<T>(r: hirsch_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        Error::Io(io) => CliError::Input(io.to_string()),
        other => CliError::Core(other),
    })
}

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    config: &'a C,
    result: R,
}

fn emit<C: Serialize, R: Serialize>(command: &str, config: &C, result: R, out: Option<&str>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&Report { command, config, result }).map_err(Error::from)? + "\n";
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(Error::from)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GmeasureResult {
    level: u32,
    iterations: usize,
    residual: f64,
    history: Vec<f64>,
    radon_nikodym_arc_level: u32,
    radon_nikodym_residual: f64,
    max_deviation_from_uniform: f64,
}

pub fn gmeasure(a: &GmeasureArgs) -> CmdResult {
    let g = input(GFunction::from_spec(&a.g))?;
    let r = compute_g_measure(&g, a.level, a.tol, a.max_iter)?;
    let arc_level = a.level.saturating_sub(2).min(8);
    let rn = if arc_level >= 2 { radon_nikodym_check(&r.measure, &g, arc_level)? } else { f64::NAN };
    let n = r.measure.len() as f64;
    let dev = r.measure.weights().iter().map(|w| (w - 1.0 / n).abs()).fold(0.0, f64::max);
    if let Some(path) = &a.out {
        r.measure.write(path)?;
    }
    if let Some(path) = &a.density_csv {
        let mut csv = String::from("theta,density\n");
        for (j, d) in r.measure.density().iter().enumerate() {
            writeln!(csv, "{},{}", r.measure.midpoint(j), d).expect("writing to a String");
        }
        std::fs::write(path, csv).map_err(Error::from)?;
    }
    emit(
        "gmeasure",
        a,
        GmeasureResult {
            level: a.level,
            iterations: r.iterations,
            residual: r.residual,
            history: r.history,
            radon_nikodym_arc_level: arc_level,
            radon_nikodym_residual: rn,
            max_deviation_from_uniform: dev,
        },
        None,
    )?;
    Ok(0)
}

enum Resolved {
    Shape(PantsShape),
    Family(MetricFamily, CircleAngle),
}

impl Resolved {
    fn shape(&self) -> hirsch_core::Result<PantsShape> {
        match self {
            Self::Shape(s) => Ok(*s),
            Self::Family(fam, z) => fam.pants_shape_at(*z),
        }
    }
}

/// Explicit lengths within [`SNAP_TOLERANCE`] of the constraint are moved onto
/// it by adding `ln(e^-L1 + e^-L2)` to both.
fn snapped_shape(l1: f64, l2: f64, eps: Option<f64>) -> Result<PantsShape, CliError> {
    let s = (-l1).exp() + (-l2).exp();
    let defect = (s - 1.0).abs();
    if defect.is_nan() || defect > SNAP_TOLERANCE {
        return Err(CliError::Input(format!(
            "shape invariant violated: e^-L1 + e^-L2 = {s} (must equal 1 within {SNAP_TOLERANCE:e})"
        )));
    }
    let (l1, l2) = (l1 + s.ln(), l2 + s.ln());
    Ok(PantsShape::new(l1, l2, eps.unwrap_or(0.5 * l1.min(l2)))?)
}

fn resolve(a: &ShapeArgs) -> Result<Resolved, CliError> {
    match (a.l1, a.l2, &a.g) {
        (Some(l1), Some(l2), None) => Ok(Resolved::Shape(snapped_shape(l1, l2, a.eps)?)),
        (None, None, Some(spec)) => Ok(Resolved::Family(
            input(MetricFamily::from_spec(spec))?,
            CircleAngle::from_turns(a.z.rem_euclid(1.0)),
        )),
        _ => Err(CliError::Input("give either --L1 and --L2, or --g".into())),
    }
}

#[derive(Serialize)]
struct AuditResult {
    l1: f64,
    l2: f64,
    eps: f64,
    pass: bool,
    failed: Vec<String>,
    records: Vec<hirsch_core::report::AuditRecord>,
}

pub fn audit(a: &AuditArgs) -> CmdResult {
    if a.grid < 8 {
        return Err(CliError::Input(format!("grid must be at least 8, got {}", a.grid)));
    }
    let target = resolve(&a.shape)?;
    let shape = target.shape()?;
    let records = match &target {
        Resolved::Shape(s) => audit_shape(s, a.grid),
        Resolved::Family(fam, z) => hirsch_core::foliation::audit_family(fam, *z, a.grid)?,
    };
    if let Some(path) = &a.laplace_csv {
        let mut csv = String::from("h,residual\n");
        for n in [16.0, 32.0, 64.0, 128.0, 256.0] {
            writeln!(csv, "{},{}", 1.0 / n, laplace_residual(&shape, 1.0 / n)).expect("writing to a String");
        }
        std::fs::write(path, csv).map_err(Error::from)?;
    }
    let pass = all_pass(&records);
    let failed: Vec<String> = failed(&records).into_iter().map(String::from).collect();
    if !pass {
        eprintln!("failed audits: {}", failed.join(", "));
    }
    emit(
        "audit",
        a,
        AuditResult {
            l1: shape.l1(),
            l2: shape.l2(),
            eps: shape.eps(),
            pass,
            failed,
            records,
        },
        None,
    )?;
    Ok(if pass { 0 } else { 4 })
}

#[derive(Serialize)]
struct EnsembleResult {
    paths: u64,
    mean_d1_crossings: f64,
    mean_d2_crossings: f64,
    mean_d3_crossings: f64,
    mean_slit_crossings: f64,
    /// Fraction ending in CYL1 of the representative with `z < 1/2`.
    fraction_in_cyl1: f64,
    /// Counts of final leaf labels in 32 equal bins.
    label_histogram: Vec<u64>,
    final_point: Option<FoliatedPoint>,
}

pub fn simulate(a: &SimulateArgs) -> CmdResult {
    let cyl = match a.cyl {
        1 => Cylinder::C1,
        2 => Cylinder::C2,
        c => return Err(CliError::Input(format!("--cyl must be 1 or 2, got {c}"))),
    };
    if a.paths == 0 {
        return Err(CliError::Input("--paths must be positive".into()));
    }
    let target = resolve(&a.shape)?;
    let shape = target.shape()?;
    let start = ChartPoint::cyl(cyl, a.u, a.v.unwrap_or(0.5 * shape.length(cyl)));
    if a.exit {
        if a.paths < 2 {
            return Err(CliError::Input("an exit study needs --paths >= 2".into()));
        }
        let study = exit_study(&shape, start, a.dt, a.paths, a.seed)?;
        emit("simulate", a, study, None)?;
        return Ok(0);
    }
    let Resolved::Family(fam, z) = &target else {
        return Err(CliError::Input("leaf simulation needs a family (--g); use --exit for a single pants".into()));
    };
    let cfg = DiffusionConfig::new(a.dt, a.t_end, a.seed)?;
    let start = FoliatedPoint::new(*z, start);
    if let Some(path) = &a.csv {
        simulate_path(fam, start, &cfg, 0)?.write_csv(path)?;
    }
    let finals = map_paths(a.paths, |i| evolve(fam, start, &cfg, &mut PathRng::new(cfg.seed, i)))?;
    let mut counts = EventCounts::default();
    let mut histogram = vec![0u64; 32];
    for (p, c) in &finals {
        counts.add(c);
        histogram[((p.label().turns() * 32.0) as usize).min(31)] += 1;
    }
    let n = a.paths as f64;
    let in_c1 = finals
        .iter()
        .filter(|(p, _)| matches!(p.canonical().p, ChartPoint::Cyl { cyl: Cylinder::C1, .. }))
        .count() as f64;
    emit(
        "simulate",
        a,
        EnsembleResult {
            paths: a.paths,
            mean_d1_crossings: counts.d1 as f64 / n,
            mean_d2_crossings: counts.d2 as f64 / n,
            mean_d3_crossings: counts.d3 as f64 / n,
            mean_slit_crossings: counts.slit as f64 / n,
            fraction_in_cyl1: in_c1 / n,
            label_histogram: histogram,
            final_point: (a.paths == 1).then(|| finals[0].0),
        },
        None,
    )?;
    Ok(0)
}

/// `uniform:<level>`, `gmeasure:<level>` (computed for `g`) or a JSON path.
fn load_measure(spec: &str, g: &GFunction) -> Result<CircleMeasure, CliError> {
    let level = |s: &str| {
        s.parse::<u32>()
            .ok()
            .filter(|l| (1..=26).contains(l))
            .ok_or_else(|| CliError::Input(format!("bad measure level `{s}`")))
    };
    if let Some(l) = spec.strip_prefix("uniform:") {
        Ok(CircleMeasure::uniform(level(l)?))
    } else if let Some(l) = spec.strip_prefix("gmeasure:") {
        Ok(compute_g_measure(g, level(l)?, 1e-13, 100_000)?.measure)
    } else if Path::new(spec).exists() {
        input(CircleMeasure::read(spec))
    } else {
        Err(CliError::Input(format!("measure `{spec}` is neither a file nor uniform:<level> / gmeasure:<level>")))
    }
}

pub fn stationarity(a: &StationarityArgs) -> CmdResult {
    if a.paths == 0 {
        return Err(CliError::Input("--paths must be positive".into()));
    }
    let fam = input(MetricFamily::from_spec(&a.g))?;
    let mu = load_measure(&a.mu, fam.g())?;
    let hm = HarmonicMeasure::new(fam, mu)?;
    let cfg = DiffusionConfig::new(a.dt, a.t_end, a.seed)?;
    let report = stationarity_test(&hm, &cfg, a.paths, a.alpha, a.bootstrap)?;
    let pass = report.pass;
    emit("stationarity", a, report, a.out.as_deref())?;
    Ok(if pass { 0 } else { 5 })
}

#[derive(Serialize)]
struct DistinctResult {
    wasserstein1: f64,
    distinct: bool,
}

pub fn distinct(a: &DistinctArgs) -> CmdResult {
    let fam = input(MetricFamily::from_spec(&a.g))?;
    let ma = HarmonicMeasure::new(fam.clone(), load_measure(&a.mu_a, fam.g())?)?;
    let mb = HarmonicMeasure::new(fam.clone(), load_measure(&a.mu_b, fam.g())?)?;
    let w1 = distinctness_test(&ma, &mb)?;
    emit(
        "distinct",
        a,
        DistinctResult {
            wasserstein1: w1,
            distinct: w1 > 0.0,
        },
        None,
    )?;
    Ok(0)
}
