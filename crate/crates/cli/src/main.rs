//! Command-line driver: scattering and Laplace solves, convergence studies,
//! and the exact disk series, all writing plot-ready CSV/JSON.

mod grid;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use aaals::curve::ParametricCurve;
use aaals::curves::{make_curve, CurveSpec};
use aaals::mfs::{IncidentField, MfsSolution};
use aaals::pipeline::{
    self, LaplaceData, LaplaceDiagnostics, LaplaceMode, LaplaceProblem, LaplaceSide, LaplaceSolution, PipelineDiagnostics,
    ScatteringOptions, ScatteringProblem, StageCache, DEGRADED_RESIDUAL,
};
use aaals::Complex64;
use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use grid::{FieldGrid, GridArg, GridSpec};

const EXIT_FAILURE: u8 = 1;
const EXIT_DEGRADED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "aaals", version, about = "Meshless sound-soft scattering with AAA-placed sources")]
struct Cli {
    #[arg(long, value_enum, default_value_t = LogLevel::Info, global = true)]
    log_level: LogLevel,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogLevel {
    Quiet,
    Info,
    Debug,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a sound-soft scattering problem and write the field on a grid.
    Solve(SolveArgs),
    /// Solve a Laplace Dirichlet problem with the rational basis.
    Laplace(LaplaceArgs),
    /// Boundary residual against source count.
    Study(StudyArgs),
    /// Exact scattered field of a plane wave off the unit disk.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Curve spec, e.g. `starfish` or `random:seed=42`.
    #[arg(long)]
    curve: CurveSpec,
    #[arg(long)]
    k: f64,
    /// `plane:angle=θ` or `point:x=…,y=…[,amp=…]`; point sources may repeat.
    #[arg(long, default_value = "plane:angle=0")]
    incident: Vec<IncidentSpec>,
    /// Multipole order R.
    #[arg(long, default_value_t = 2)]
    order: u32,
    #[arg(long, default_value_t = 1e-6)]
    tol_circle: f64,
    #[arg(long, default_value_t = aaals::conformal::DEFAULT_MAP_TOL)]
    tol_map: f64,
    #[arg(long, default_value_t = 0.3)]
    shrink: f64,
    /// Collocation points per support gap (default 3, or 9 for order 2).
    #[arg(long)]
    samples_per_gap: Option<usize>,
    /// Start every continuum fit from scratch.
    #[arg(long)]
    no_recycle: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// `nx,ny` or `nx,ny,x_min,x_max,y_min,y_max`.
    #[arg(long, default_value = "101,101")]
    grid: GridArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Stage cache directory (`AAALS_CACHE` takes precedence).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Write the total field u_s − u_inc (default).
    #[arg(long, conflicts_with = "scattered")]
    total: bool,
    /// Write the scattered field u_s.
    #[arg(long)]
    scattered: bool,
}

#[derive(Args)]
struct LaplaceArgs {
    #[arg(long)]
    curve: CurveSpec,
    #[arg(long, default_value = "support")]
    mode: LaplaceMode,
    #[arg(long, default_value = "exterior")]
    side: LaplaceSide,
    /// zero, resq, harmonic or sqrt_singular.
    #[arg(long)]
    data: LaplaceData,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1.0)]
    shrink: f64,
    #[arg(long, default_value_t = pipeline::LAPLACE_POLY_DEGREE)]
    poly_degree: usize,
    #[arg(long, default_value = "101,101")]
    grid: GridArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated source counts.
    #[arg(long)]
    j: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    k: f64,
    /// Plane-wave direction in radians.
    #[arg(long, default_value_t = 0.0)]
    angle: f64,
    #[arg(long, default_value = "101,101,-3,3,-3,3")]
    grid: GridArg,
    /// Evaluate on `n` equispaced points of the circle of radius `r` instead of the grid.
    #[arg(long, value_name = "R,N")]
    ring: Option<String>,
    /// Series truncation |n| ≤ nmax (default k + 8k^(1/3) + 20).
    #[arg(long)]
    nmax: Option<u32>,
    /// Write the physical total field u_inc + u_s instead of u_s.
    #[arg(long)]
    total: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Debug)]
enum IncidentSpec {
    Plane { angle: f64 },
    Point { at: Complex64, amp: f64 },
}

impl FromStr for IncidentSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut angle = 0.0;
        let (mut x, mut y, mut amp) = (None, None, 1.0);
        for kv in args.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, got `{kv}`"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("bad number `{v}` for `{k}`"))?;
            match (kind, k.trim()) {
                ("plane", "angle") => angle = v,
                ("point", "x") => x = Some(v),
                ("point", "y") => y = Some(v),
                ("point", "amp") => amp = v,
                _ => return Err(format!("unknown parameter `{k}` for `{kind}` incidence")),
            }
        }
        match kind {
            "plane" => Ok(IncidentSpec::Plane { angle }),
            "point" => match (x, y) {
                (Some(x), Some(y)) => Ok(IncidentSpec::Point { at: Complex64::new(x, y), amp }),
                _ => Err("point incidence needs x and y".into()),
            },
            _ => Err(format!("incidence must be plane or point, got `{kind}`")),
        }
    }
}

/// A flag combination clap cannot reject on its own.
fn usage_error(kind: ErrorKind, msg: impl std::fmt::Display) -> ExitCode {
    let _ = Cli::command().error(kind, msg).print();
    ExitCode::from(EXIT_USAGE)
}

enum Outcome {
    Done,
    Degraded,
}

impl ProblemArgs {
    fn incident(&self) -> Result<IncidentField, String> {
        match self.incident.as_slice() {
            [IncidentSpec::Plane { angle }] => IncidentField::plane_wave(self.k, *angle).map_err(|e| e.to_string()),
            specs => {
                let mut at = Vec::new();
                let mut amp = Vec::new();
                for s in specs {
                    match s {
                        IncidentSpec::Point { at: z, amp: a } => {
                            at.push(*z);
                            amp.push(Complex64::new(*a, 0.0));
                        }
                        IncidentSpec::Plane { .. } => return Err("a plane wave cannot be combined with other incident fields".into()),
                    }
                }
                IncidentField::point_sources(self.k, at, amp).map_err(|e| e.to_string())
            }
        }
    }

    fn options(&self) -> ScatteringOptions {
        ScatteringOptions {
            tol_circle: self.tol_circle,
            tol_map: self.tol_map,
            order: self.order,
            shrink: self.shrink,
            samples_per_gap: self.samples_per_gap,
            recycle: !self.no_recycle,
            ..ScatteringOptions::default()
        }
    }
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    write(dir, name, serde_json::to_string_pretty(value)? + "\n")
}

fn write_grid(dir: &Path, grid: &FieldGrid) -> Result<()> {
    let path = dir.join("field.csv");
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    grid.write_csv(std::io::BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))
}

fn finish(dir: &Path, residual: f64) -> Result<Outcome> {
    write(dir, "residual.txt", format!("{residual:.16e}\n"))?;
    Ok(if residual <= DEGRADED_RESIDUAL { Outcome::Done } else { Outcome::Degraded })
}

#[derive(Serialize)]
struct SolveDiagnostics<'a> {
    command: &'static str,
    field: &'static str,
    grid: GridSpec,
    #[serde(flatten)]
    pipeline: &'a PipelineDiagnostics,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    curve: &'a str,
    incident: &'a IncidentField,
    solution: &'a MfsSolution,
}

fn cmd_solve(a: &SolveArgs, curve: ParametricCurve, incident: IncidentField) -> Result<Outcome> {
    let cache_dir = std::env::var_os("AAALS_CACHE").map(PathBuf::from).or_else(|| a.cache.clone());
    let cache = cache_dir.map(StageCache::new).transpose()?;
    let p = ScatteringProblem { curve: curve.clone(), incident: incident.clone(), options: a.problem.options() };
    let (sol, diag) = pipeline::solve_scattering_cached(&p, cache.as_ref())?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let spec = a.grid.resolve(&curve);
    let grid = if a.scattered {
        FieldGrid::evaluate(spec, |z| curve.contains(z), |z| sol.eval(z))
    } else {
        FieldGrid::evaluate(spec, |z| curve.contains(z), |z| sol.eval(z) - incident.eval(z))
    };
    write_grid(&a.out, &grid)?;
    let field = if a.scattered { "scattered" } else { "total" };
    write_json(&a.out, "diagnostics.json", &SolveDiagnostics { command: "solve", field, grid: spec, pipeline: &diag })?;
    write_json(&a.out, "solution.json", &SolveOutput { curve: curve.label(), incident: &incident, solution: &sol })?;
    finish(&a.out, diag.boundary_residual)
}

#[derive(Serialize)]
struct LaplaceOutput<'a> {
    curve: &'a str,
    data: LaplaceData,
    solution: &'a LaplaceSolution,
}

#[derive(Serialize)]
struct LaplaceDiagnosticsOut<'a> {
    command: &'static str,
    grid: GridSpec,
    #[serde(flatten)]
    laplace: &'a LaplaceDiagnostics,
}

fn cmd_laplace(a: &LaplaceArgs, curve: ParametricCurve) -> Result<Outcome> {
    let mut p = LaplaceProblem::new(curve.clone(), a.data, a.side, a.mode);
    p.options.tol = a.tol;
    p.options.shrink = a.shrink;
    p.options.poly_degree = a.poly_degree;
    let (sol, diag) = pipeline::solve_laplace(&p)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let spec = a.grid.resolve(&curve);
    // the mask hides everything outside the solution domain
    let exterior = a.side == LaplaceSide::Exterior;
    let grid = FieldGrid::evaluate(spec, |z| curve.contains(z) == exterior, |z| Complex64::new(sol.eval(z), 0.0));
    write_grid(&a.out, &grid)?;
    write_json(&a.out, "diagnostics.json", &LaplaceDiagnosticsOut { command: "laplace", grid: spec, laplace: &diag })?;
    write_json(&a.out, "solution.json", &LaplaceOutput { curve: curve.label(), data: a.data, solution: &sol })?;
    finish(&a.out, diag.boundary_residual)
}

fn cmd_study(a: &StudyArgs, curve: ParametricCurve, incident: IncidentField, js: &[usize]) -> Result<Outcome> {
    let s = pipeline::convergence_study(&curve, &incident, js, &a.problem.options())?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut w = csv::Writer::from_path(a.out.join("study.csv"))?;
    w.write_record(["J", "residual"])?;
    for r in &s.rows {
        w.write_record([r.j.to_string(), format!("{:.16e}", r.residual)])?;
    }
    w.flush()?;
    write_json(&a.out, "summary.json", &s)?;
    info!("slope {:.4} per source, R² {:.4} over {} rows", s.slope, s.r_squared, s.fit_rows);
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct OracleDiagnostics {
    command: &'static str,
    field: &'static str,
    k: f64,
    angle: f64,
    nmax: u32,
    grid: Option<GridSpec>,
}

fn cmd_oracle(a: &OracleArgs, ring: Option<(f64, usize)>) -> Result<Outcome> {
    let nmax = a.nmax.unwrap_or_else(|| pipeline::disk_truncation(a.k));
    let inc = IncidentField::plane_wave(a.k, a.angle)?;
    let value = |z: Complex64| -> Result<Complex64> {
        let us = pipeline::exact_disk_scatter_with(a.k, a.angle, &[z], nmax)?[0];
        Ok(if a.total { us + inc.eval(z) } else { us })
    };
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let spec = match ring {
        Some((r, n)) => {
            let mut w = csv::Writer::from_path(a.out.join("field.csv"))?;
            w.write_record(["x", "y", "re", "im", "mask"])?;
            for j in 0..n {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / n as f64);
                let v = value(z)?;
                w.write_record([z.re, z.im, v.re, v.im].map(|x| format!("{x:.16e}")).into_iter().chain(["0".to_string()]))?;
            }
            w.flush()?;
            None
        }
        None => {
            let spec = a.grid.resolve(&aaals::conformal::unit_circle());
            // the series is only defined outside the disk
            let grid = FieldGrid::evaluate(spec, |z| z.norm() < 1.0, |z| value(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)));
            if grid.cells.iter().any(|(_, v)| v.is_some_and(|v| v.is_nan())) {
                anyhow::bail!("series truncation at |n| = {nmax} did not converge on the grid");
            }
            write_grid(&a.out, &grid)?;
            Some(spec)
        }
    };
    let field = if a.total { "total" } else { "scattered" };
    write_json(&a.out, "diagnostics.json", &OracleDiagnostics { command: "oracle", field, k: a.k, angle: a.angle, nmax, grid: spec })?;
    Ok(Outcome::Done)
}

fn curve_or_usage(spec: &CurveSpec) -> Result<ParametricCurve, ExitCode> {
    make_curve(spec).map_err(|e| usage_error(ErrorKind::ValueValidation, format!("invalid --curve: {e}")))
}

fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Solve(a) => {
            let curve = match curve_or_usage(&a.problem.curve) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match a.problem.incident() {
                Ok(inc) => cmd_solve(a, curve, inc),
                Err(e) => return usage_error(ErrorKind::ValueValidation, format!("invalid --incident: {e}")),
            }
        }
        Command::Laplace(a) => match curve_or_usage(&a.curve) {
            Ok(c) => cmd_laplace(a, c),
            Err(code) => return code,
        },
        Command::Study(a) => {
            let js: Result<Vec<usize>, _> = a.j.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse::<usize>()).collect();
            let js = match js {
                Ok(js) if !js.is_empty() && js.iter().all(|&j| j > 0) => js,
                _ => return usage_error(ErrorKind::InvalidValue, format!("--j must be a nonempty list of positive counts, got `{}`", a.j)),
            };
            let curve = match curve_or_usage(&a.problem.curve) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match a.problem.incident() {
                Ok(inc) => cmd_study(a, curve, inc, &js),
                Err(e) => return usage_error(ErrorKind::ValueValidation, format!("invalid --incident: {e}")),
            }
        }
        Command::Oracle(a) => {
            let ring = match a.ring.as_deref().map(|s| {
                s.split_once(',').and_then(|(r, n)| Some((r.trim().parse::<f64>().ok()?, n.trim().parse::<usize>().ok()?)))
            }) {
                None => None,
                Some(Some((r, n))) if r >= 1.0 && n > 0 => Some((r, n)),
                Some(_) => return usage_error(ErrorKind::InvalidValue, "--ring expects R,N with R ≥ 1 and N > 0"),
            };
            cmd_oracle(a, ring)
        }
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Degraded) => {
            log::warn!("degraded accuracy: boundary residual above {DEGRADED_RESIDUAL:e}");
            ExitCode::from(EXIT_DEGRADED)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.log_level {
        LogLevel::Quiet => log::LevelFilter::Error,
        LogLevel::Info => log::LevelFilter::Info,
        LogLevel::Debug => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    run(cli)
}
