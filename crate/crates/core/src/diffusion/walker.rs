use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{DiffusionConfig, PathRng, MAX_HALVINGS};
use crate::circle_dynamics::CircleAngle;
use crate::error::{Error, Result};
use crate::foliation::{cross_inward, cross_outward, Direction, FoliatedPoint, HolonomyEvent, MetricFamily};
use crate::pants_geometry::{BoundaryId, ChartPoint, Cylinder, PantsShape, SlitSide, BELOW_ONE};

/// Chart changes allowed within a single step.
const MAX_CROSSINGS_PER_STEP: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Event {
    Holonomy(HolonomyEvent),
    /// Through the slit from `side` of `from` into the other cylinder.
    Slit { from: Cylinder, side: SlitSide, v: f64 },
}

impl Event {
    pub fn flag(&self) -> &'static str {
        match self {
            Self::Holonomy(h) => match h.boundary {
                BoundaryId::D1 => "D1",
                BoundaryId::D2 => "D2",
                BoundaryId::D3 => "D3",
            },
            Self::Slit { .. } => "slit",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EventCounts {
    pub d1: u64,
    pub d2: u64,
    pub d3: u64,
    pub slit: u64,
}

impl EventCounts {
    pub fn record(&mut self, e: &Event) {
        match e {
            Event::Holonomy(h) => match h.boundary {
                BoundaryId::D1 => self.d1 += 1,
                BoundaryId::D2 => self.d2 += 1,
                BoundaryId::D3 => self.d3 += 1,
            },
            Event::Slit { .. } => self.slit += 1,
        }
    }

    pub fn add(&mut self, other: &Self) {
        self.d1 += other.d1;
        self.d2 += other.d2;
        self.d3 += other.d3;
        self.slit += other.slit;
    }

    pub fn holonomy(&self) -> u64 {
        self.d1 + self.d2 + self.d3
    }
}

/// Where an absorbed path left its pants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Absorbed {
    pub boundary: BoundaryId,
    /// `phi` at the unclamped end of the step that crossed.
    pub phi_overshoot: f64,
}

/// A Brownian particle in half-plane coordinates of one cylinder chart.
///
/// With a metric family the particle moves on the whole leaf, changing pants
/// at `D1`, `D2`, `D3`. Without one it lives in a single pants and is absorbed
/// at the boundary.
#[derive(Clone, Debug)]
pub struct Walker<'a> {
    fam: Option<&'a MetricFamily>,
    z: CircleAngle,
    shape: PantsShape,
    cyl: Cylinder,
    u: f64,
    y: f64,
    cone_guard: f64,
    events: usize,
    max_events: usize,
}

impl<'a> Walker<'a> {
    pub fn new(fam: &'a MetricFamily, start: FoliatedPoint, cfg: &DiffusionConfig) -> Result<Self> {
        cfg.validate()?;
        let shape = fam.pants_shape_at(start.z)?;
        let mut w = Self::in_pants(shape, start.p, cfg.cone_guard)?;
        w.fam = Some(fam);
        w.z = start.z;
        w.max_events = cfg.max_events;
        Ok(w)
    }

    /// A particle confined to one pants, absorbed at its boundary.
    pub fn in_pants(shape: PantsShape, p: ChartPoint, cone_guard: f64) -> Result<Self> {
        let ChartPoint::Cyl { cyl, u, v } = p else {
            return Err(Error::InvalidConfig("the walker starts in a cylinder chart".into()));
        };
        if !(0.0..1.0).contains(&u) || !(0.0..=shape.length(cyl)).contains(&v) {
            return Err(Error::InvalidConfig(format!("start (u, v) = ({u}, {v}) outside {}", cyl.name())));
        }
        if shape.is_cone_point(&p) {
            return Err(Error::SingularPoint);
        }
        Ok(Self {
            fam: None,
            z: CircleAngle::ZERO,
            shape,
            cyl,
            u,
            y: (shape.length(cyl) - v).exp(),
            cone_guard,
            events: 0,
            max_events: usize::MAX,
        })
    }

    pub fn point(&self) -> FoliatedPoint {
        FoliatedPoint::new(self.z, ChartPoint::cyl(self.cyl, self.u, self.v()))
    }

    pub fn shape(&self) -> &PantsShape {
        &self.shape
    }

    pub fn cylinder(&self) -> Cylinder {
        self.cyl
    }

    pub fn v(&self) -> f64 {
        self.shape.length(self.cyl) - self.y.ln()
    }

    /// `phi = e^{-v} = e^{-L} y`.
    pub fn phi(&self) -> f64 {
        (-self.shape.length(self.cyl)).exp() * self.y
    }

    /// One step of length `dt`. Steps that would send `y` through zero are
    /// split into two half steps with fresh noise.
    pub(crate) fn advance(
        &mut self,
        dt: f64,
        rng: &mut PathRng,
        on_event: &mut dyn FnMut(Event),
    ) -> Result<Option<Absorbed>> {
        self.advance_at(dt, rng, on_event, 0)
    }

    fn advance_at(
        &mut self,
        dt: f64,
        rng: &mut PathRng,
        on_event: &mut dyn FnMut(Event),
        depth: u32,
    ) -> Result<Option<Absorbed>> {
        let a = (2.0 * dt).sqrt();
        let (n1, n2) = (rng.normal(), rng.normal());
        let d = 1.0 + a * n2;
        if d > 0.0 {
            return self.displace(a * n1, d, on_event);
        }
        if depth >= MAX_HALVINGS {
            return Err(Error::StepUnderflow { levels: MAX_HALVINGS });
        }
        if let Some(hit) = self.advance_at(0.5 * dt, rng, on_event, depth + 1)? {
            return Ok(Some(hit));
        }
        self.advance_at(0.5 * dt, rng, on_event, depth + 1)
    }

    /// Moves along the segment from `(u, y)` to `(u + c y, d y)`, changing
    /// charts wherever it leaves `[0, 1) x [1, e^L]`.
    pub(crate) fn displace(&mut self, c: f64, d: f64, on_event: &mut dyn FnMut(Event)) -> Result<Option<Absorbed>> {
        #[derive(Clone, Copy)]
        enum Edge {
            Top,
            Bottom,
            Right,
            Left,
        }
        let (mut u0, mut y0) = (self.u, self.y);
        let (mut u1, mut y1) = (u0 + c * y0, d * y0);
        let mut crossings = 0;
        loop {
            let l = self.shape.length(self.cyl);
            let y_bottom = l.exp();
            let mut first: Option<(f64, Edge)> = None;
            let mut consider = |s: f64, e: Edge| {
                if first.is_none_or(|(best, _)| s < best) {
                    first = Some((s, e));
                }
            };
            if y1 < 1.0 {
                consider((y0 - 1.0) / (y0 - y1), Edge::Top);
            }
            if y1 > y_bottom {
                consider((y_bottom - y0) / (y1 - y0), Edge::Bottom);
            }
            if u1 >= 1.0 {
                consider((1.0 - u0) / (u1 - u0), Edge::Right);
            }
            if u1 < 0.0 {
                consider(u0 / (u0 - u1), Edge::Left);
            }
            let Some((s, edge)) = first else { break };
            crossings += 1;
            if crossings > MAX_CROSSINGS_PER_STEP {
                return Err(Error::MaxEventsExceeded {
                    max_events: MAX_CROSSINGS_PER_STEP,
                });
            }
            let s = s.clamp(0.0, 1.0);
            let uc = (u0 + s * (u1 - u0)).clamp(0.0, BELOW_ONE);
            let yc = y0 + s * (y1 - y0);
            match edge {
                Edge::Top | Edge::Bottom => {
                    let boundary = match edge {
                        Edge::Top => self.cyl.upper_boundary(),
                        _ => BoundaryId::D3,
                    };
                    let Some(fam) = self.fam else {
                        self.u = uc;
                        self.y = if matches!(edge, Edge::Top) { 1.0 } else { y_bottom };
                        return Ok(Some(Absorbed {
                            boundary,
                            phi_overshoot: (-l).exp() * y1,
                        }));
                    };
                    let (event, u_new, y_new, beta) = if boundary == BoundaryId::D3 {
                        let theta = self.shape.d3_param(self.cyl, uc);
                        let (z2, _, arrival) = cross_outward(self.z, CircleAngle::from_turns(theta));
                        let shape = fam.pants_shape_at(z2)?;
                        let event = HolonomyEvent {
                            boundary,
                            theta_exit: theta,
                            theta_arrival: arrival.turns(),
                            z_before: self.z,
                            z_after: z2,
                            direction: Direction::Outward,
                        };
                        self.z = z2;
                        self.shape = shape;
                        self.cyl = Cylinder::C1;
                        (event, arrival.turns(), 1.0, (-l).exp())
                    } else {
                        let (w, arrival) = cross_inward(self.z, boundary, CircleAngle::from_turns(uc))?;
                        let shape = fam.pants_shape_at(w)?;
                        let (cyl, u_arr) = shape.d3_chart(arrival.turns());
                        let beta = shape.length(cyl).exp();
                        let event = HolonomyEvent {
                            boundary,
                            theta_exit: uc,
                            theta_arrival: arrival.turns(),
                            z_before: self.z,
                            z_after: w,
                            direction: Direction::Inward,
                        };
                        self.z = w;
                        self.shape = shape;
                        self.cyl = cyl;
                        (event, u_arr, beta, beta)
                    };
                    u1 = u_new + beta * (u1 - uc);
                    y1 *= beta;
                    (u0, y0) = (u_new, y_new);
                    self.count_event()?;
                    on_event(Event::Holonomy(event));
                }
                Edge::Right | Edge::Left => {
                    let right = matches!(edge, Edge::Right);
                    let (edge_u, far_u) = if right { (1.0, 0.0) } else { (0.0, 1.0) };
                    if yc > (l - self.shape.eps()).exp() {
                        let from = self.cyl;
                        let to = from.other();
                        let lambda = (self.shape.length(to) - l).exp();
                        u1 = far_u + lambda * (u1 - edge_u);
                        y1 *= lambda;
                        (u0, y0) = (far_u, lambda * yc);
                        self.cyl = to;
                        self.count_event()?;
                        on_event(Event::Slit {
                            from,
                            side: if right { SlitSide::Left } else { SlitSide::Right },
                            v: l - yc.ln(),
                        });
                    } else {
                        u1 += far_u - edge_u;
                        (u0, y0) = (far_u, yc);
                    }
                }
            }
        }
        self.u = if u1 < 1.0 { u1.max(0.0) } else { BELOW_ONE };
        self.y = y1;
        self.reflect_off_cone();
        Ok(None)
    }

    fn count_event(&mut self) -> Result<()> {
        self.events += 1;
        if self.events > self.max_events {
            return Err(Error::MaxEventsExceeded {
                max_events: self.max_events,
            });
        }
        Ok(())
    }

    /// Mirrors the particle radially out of the guard disk around the cone
    /// point, staying on the same side of the slit line.
    fn reflect_off_cone(&mut self) {
        let y_cone = (self.shape.length(self.cyl) - self.shape.eps()).exp();
        let u_cone = if self.u < 0.5 { 0.0 } else { 1.0 };
        let (du, dy) = (self.u - u_cone, self.y - y_cone);
        let r = du.hypot(dy) / y_cone;
        if r >= self.cone_guard {
            return;
        }
        if r == 0.0 {
            self.y = y_cone * (1.0 + self.cone_guard);
            return;
        }
        let k = (2.0 * self.cone_guard - r) / r;
        self.u = (u_cone + k * du).clamp(0.0, BELOW_ONE);
        self.y = y_cone + k * dy;
    }
}

/// One recorded state of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub point: FoliatedPoint,
    /// Events during the step that ended here, `+`-joined, or `none`.
    pub event_flag: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<(f64, Event)>,
}

impl Trajectory {
    /// `t,z_theta,chart,u,v,event_flag`, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,z_theta,chart,u,v,event_flag\n");
        for s in &self.samples {
            let ChartPoint::Cyl { cyl, u, v } = s.point.p else { continue };
            writeln!(out, "{},{},{},{},{},{}", s.t, s.point.z.turns(), cyl.name(), u, v, s.event_flag)
                .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Step times `dt, 2 dt, ...` up to and including `t_end`.
fn step_lengths(cfg: &DiffusionConfig) -> impl Iterator<Item = (f64, f64)> + '_ {
    let n = if cfg.t_end == 0.0 { 0 } else { (cfg.t_end / cfg.dt - 1e-9).ceil() as usize };
    (1..=n).map(move |k| {
        let t0 = (k - 1) as f64 * cfg.dt;
        let t1 = if k == n { cfg.t_end } else { k as f64 * cfg.dt };
        (t1, t1 - t0)
    })
}

/// A full trajectory of path `path` (its random stream is `(cfg.seed, path)`).
pub fn simulate_path(fam: &MetricFamily, start: FoliatedPoint, cfg: &DiffusionConfig, path: u64) -> Result<Trajectory> {
    let mut walker = Walker::new(fam, start, cfg)?;
    let mut rng = PathRng::new(cfg.seed, path);
    let mut traj = Trajectory {
        samples: vec![Sample {
            t: 0.0,
            point: walker.point(),
            event_flag: "none".into(),
        }],
        events: Vec::new(),
    };
    for (t, h) in step_lengths(cfg) {
        let mut step_events = Vec::new();
        walker.advance(h, &mut rng, &mut |e| step_events.push(e))?;
        let flag = if step_events.is_empty() {
            "none".to_string()
        } else {
            step_events.iter().map(Event::flag).collect::<Vec<_>>().join("+")
        };
        traj.events.extend(step_events.into_iter().map(|e| (t, e)));
        traj.samples.push(Sample {
            t,
            point: walker.point(),
            event_flag: flag,
        });
    }
    Ok(traj)
}

/// Evolves `start` to `cfg.t_end` without recording, drawing from `rng`.
pub fn evolve(
    fam: &MetricFamily,
    start: FoliatedPoint,
    cfg: &DiffusionConfig,
    rng: &mut PathRng,
) -> Result<(FoliatedPoint, EventCounts)> {
    let mut walker = Walker::new(fam, start, cfg)?;
    let mut counts = EventCounts::default();
    for (_, h) in step_lengths(cfg) {
        walker.advance(h, rng, &mut |e| counts.record(&e))?;
    }
    Ok((walker.point(), counts))
}
