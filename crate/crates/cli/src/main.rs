//! `hirsch`: batch front end for the harmonic-measure laboratory.
//!
//! Exit codes: 0 success or pass, 1 runtime failure, 2 bad input,
//! 3 no convergence, 4 audit failure, 5 statistical rejection.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "hirsch", version, about = "Harmonic measures on the Hirsch foliation")]
struct Cli {
    /// Worker threads for ensemble runs (results do not depend on it).
    #[arg(long, global = true, env = "HIRSCH_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the g-measure of a g-function by power iteration.
    Gmeasure(GmeasureArgs),
    /// Run the geometric audits of one pants.
    Audit(AuditArgs),
    /// Simulate leafwise Brownian motion (trajectories or exit studies).
    Simulate(SimulateArgs),
    /// Test a candidate harmonic measure for stationarity.
    Stationarity(StationarityArgs),
    /// W1 distance between the transverse marginals of two candidates.
    Distinct(DistinctArgs),
}

#[derive(Args, Debug, Serialize)]
struct GmeasureArgs {
    /// `const2`, `sine:a=<a>` or `table:<path>`.
    #[arg(long)]
    g: String,
    #[arg(long, default_value_t = 12)]
    level: u32,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Write the measure as JSON here.
    #[arg(long)]
    out: Option<String>,
    /// Write `theta,density` rows here.
    #[arg(long)]
    density_csv: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct ShapeArgs {
    #[arg(long = "L1", requires = "l2", conflicts_with = "g")]
    l1: Option<f64>,
    #[arg(long = "L2", requires = "l1")]
    l2: Option<f64>,
    /// Family spec, e.g. `sine:a=0.5,eps=0.05`.
    #[arg(long, required_unless_present = "l1")]
    g: Option<String>,
    /// Base point of the pants in the family.
    #[arg(long, default_value_t = 0.0, requires = "g")]
    z: f64,
    /// Slit length for an explicit shape (default min(L1, L2) / 2).
    #[arg(long, conflicts_with = "g")]
    eps: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct AuditArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Write `h,residual` rows of the Laplace residual here.
    #[arg(long)]
    laplace_csv: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Starting cylinder, 1 or 2.
    #[arg(long, default_value_t = 1)]
    cyl: u8,
    #[arg(long, default_value_t = 0.5)]
    u: f64,
    /// Starting height (default half the cylinder length).
    #[arg(long)]
    v: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    paths: u64,
    /// Run an exit study in the single pants instead of following the leaf.
    #[arg(long)]
    exit: bool,
    /// Write the trajectory of path 0 here.
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct StationarityArgs {
    /// Family spec, e.g. `sine:a=0.3`.
    #[arg(long)]
    g: String,
    /// Measure JSON path, `uniform:<level>` or `gmeasure:<level>`.
    #[arg(long)]
    mu: String,
    #[arg(long)]
    paths: u64,
    #[arg(long, default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-2)]
    dt: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 200)]
    bootstrap: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct DistinctArgs {
    #[arg(long)]
    g: String,
    #[arg(long)]
    mu_a: String,
    #[arg(long)]
    mu_b: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match &cli.command {
        Command::Gmeasure(a) => commands::gmeasure(a),
        Command::Audit(a) => commands::audit(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Stationarity(a) => commands::stationarity(a),
        Command::Distinct(a) => commands::distinct(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
