use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("g-function identity 1/g(z) + 1/g(-z) = 1 violated at theta = {theta}: residual {residual:e}")]
    IdentityViolated { theta: f64, residual: f64 },

    #[error("g-function must exceed 1 everywhere, but g({theta}) = {value}")]
    NotGreaterThanOne { theta: f64, value: f64 },

    #[error(
        "power iteration did not converge after {iterations} iterations (last TV step {residual:e}{})",
        if *.oscillating { ", period-2 oscillation detected" } else { "" }
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        oscillating: bool,
    },

    #[error("arc level {level} is too coarse: T is injective only on arcs of level >= 2")]
    ArcTooCoarse { level: u32 },

    #[error("arc level {arc_level} is too fine for a measure of level {measure_level} (need arc_level <= level - 2)")]
    ArcTooFine { arc_level: u32, measure_level: u32 },

    #[error("invalid pants shape: {0}")]
    InvalidShape(String),

    #[error("metric is singular at the cone point")]
    SingularPoint,

    #[error("slit crossing requested at the cone point v = eps")]
    AtConePoint,

    #[error("step size underflow: halved more than {levels} times")]
    StepUnderflow { levels: u32 },

    #[error("trajectory exceeded {max_events} crossing events")]
    MaxEventsExceeded { max_events: usize },

    #[error("harmonic measures are built over different metric families")]
    FamilyMismatch,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid g-function or family: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
