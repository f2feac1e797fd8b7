//! End-to-end solvers: sound-soft Helmholtz scattering with automatic source
//! placement, the Laplace limit, the exact disk series, and convergence studies.
//!
//! Stages of [`solve_scattering`], numbered as in stage errors and timings:
//! - 1: the curve Γ(t) is given;
//! - 2: fit the boundary map M and the zeros O of M′;
//! - 3: fit v = Re u_inc(Γ(t)) on the unit circle, seeded with the map's
//!   support points, and collect its interior poles Q;
//! - 4–5: bound Q ∪ O by the shielding curve γ;
//! - 6: fit v on Γ, seeded with stage 3's support points;
//! - 7–8: move each support angle θ_j to √ρ(θ_j)e^{iθ_j} and map it back by M;
//! - 9: assemble, solve, and measure the boundary residual.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use faer::Mat;
use log::{debug, info};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::conformal::{self, build_shield, fit_map, unit_circle, ConformalMap, ShieldingCurve, INTERIOR_RADIUS};
use crate::continuum_aaa::{aaazp, AaazpOptions, ContinuumApprox};
use crate::curve::ParametricCurve;
use crate::error::{Error, Result};
use crate::linalg::lstsq_real;
use crate::mfs::{self, assemble, boundary_residual, gap_samples, place_sources, refine_params, IncidentField, MfsSolution};
use crate::specfun::{bessel_j_seq, hankel1_seq};

/// Residuals above this are reported as degraded accuracy.
pub const DEGRADED_RESIDUAL: f64 = 1e-4;
pub const LAPLACE_POLY_DEGREE: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringOptions {
    pub tol_circle: f64,
    pub tol_map: f64,
    pub order: u32,
    pub shrink: f64,
    /// Collocation points per support gap; `None` picks 3 (R ≤ 1) or 9 (R = 2).
    pub samples_per_gap: Option<usize>,
    pub refine_check: usize,
    /// Seed each continuum fit with the previous stage's support points.
    pub recycle: bool,
    pub mmax: usize,
}

impl Default for ScatteringOptions {
    fn default() -> Self {
        Self {
            tol_circle: 1e-6,
            tol_map: conformal::DEFAULT_MAP_TOL,
            order: mfs::DEFAULT_ORDER,
            shrink: 0.3,
            samples_per_gap: None,
            refine_check: mfs::REFINE_CHECK,
            recycle: true,
            mmax: 300,
        }
    }
}

impl ScatteringOptions {
    pub fn per_gap(&self) -> usize {
        self.samples_per_gap.unwrap_or(if self.order >= 2 { 9 } else { 3 })
    }
}

#[derive(Clone, Debug)]
pub struct ScatteringProblem {
    pub curve: ParametricCurve,
    pub incident: IncidentField,
    pub options: ScatteringOptions,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageTime {
    pub stage: u8,
    pub name: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineDiagnostics {
    pub curve: String,
    pub k: f64,
    pub map_degree: usize,
    pub v_circle_degree: usize,
    pub v_gamma_degree: usize,
    /// Interior poles of the circle fit (ζ-plane).
    pub q: Vec<Complex64>,
    /// Interior zeros of M′.
    pub o: Vec<Complex64>,
    pub gamma_knots: Vec<(f64, f64)>,
    pub support_angles: Vec<f64>,
    pub sources: Vec<Complex64>,
    pub source_count: usize,
    pub sample_count: usize,
    pub unknowns: usize,
    pub rank: usize,
    pub boundary_residual: f64,
    pub degraded: bool,
    /// Initial support sizes handed to stages 2, 3 and 6.
    pub recycled_support_counts: [usize; 3],
    pub wall_times: Vec<StageTime>,
}

fn stage<T>(stage: u8, name: &'static str, times: &mut Vec<StageTime>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| Error::Stage { stage, name, cause: Box::new(e) });
    let seconds = start.elapsed().as_secs_f64();
    debug!("stage {stage} ({name}): {seconds:.3} s");
    times.push(StageTime { stage, name: name.to_string(), seconds });
    out
}

/// JSON cache of stage results keyed by curve fingerprint.
#[derive(Clone, Debug)]
pub struct StageCache {
    dir: PathBuf,
}

impl StageCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::InvalidInput(format!("cache dir {}: {e}", dir.display())))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, kind: &str, curve: &ParametricCurve, tol: f64) -> PathBuf {
        self.dir.join(format!("{kind}-{}-{tol:e}.json", curve.fingerprint()))
    }

    /// Cached value if present and readable, otherwise computes and stores it.
    pub fn get_or_compute<T: Serialize + DeserializeOwned>(
        &self,
        kind: &str,
        curve: &ParametricCurve,
        tol: f64,
        compute: impl FnOnce() -> Result<T>,
    ) -> Result<T> {
        let path = self.path(kind, curve, tol);
        if let Ok(text) = fs::read_to_string(&path) {
            match serde_json::from_str(&text) {
                Ok(v) => {
                    debug!("cache hit {}", path.display());
                    return Ok(v);
                }
                Err(e) => log::warn!("ignoring unreadable cache file {}: {e}", path.display()),
            }
        }
        let v = compute()?;
        if let Err(e) = fs::write(&path, serde_json::to_string(&v)?) {
            log::warn!("could not write cache file {}: {e}", path.display());
        }
        Ok(v)
    }
}

fn map_for(curve: &ParametricCurve, tol: f64, cache: Option<&StageCache>) -> Result<ConformalMap> {
    match cache {
        Some(c) => c.get_or_compute("map", curve, tol, || fit_map(curve, tol)),
        None => fit_map(curve, tol),
    }
}

fn fit_on(
    curve: &ParametricCurve,
    tol: f64,
    mmax: usize,
    seed: Vec<f64>,
    f: impl Fn(f64) -> f64 + Sync,
) -> Result<ContinuumApprox> {
    let opts = AaazpOptions { mmax, initial_support: seed, ..AaazpOptions::with_tol(tol) };
    let fit = aaazp(|t, _| Complex64::new(f(t), 0.0), curve, &opts)?;
    if !fit.converged {
        log::warn!("fit on {} stopped at degree {} with error {:.3e}", curve.label(), fit.degree(), fit.max_error);
    }
    Ok(fit)
}

/// Sources as in [`place_sources`], dropping those that land outside Γ. Used
/// where the fitted M folds over inside the disk.
fn place_inside(map: &ConformalMap, gamma: &ShieldingCurve, angles: &[f64], g: &ParametricCurve) -> Result<Vec<Complex64>> {
    let sources: Vec<Complex64> = angles
        .iter()
        .map(|&th| map.eval(Complex64::from_polar(gamma.radius(th).sqrt(), th)))
        .filter(|p| p.is_finite() && g.contains(*p))
        .collect();
    if sources.is_empty() {
        return Err(Error::Placement("no source lands inside Γ".into()));
    }
    log::warn!("fitted map folds over: kept {} of {} sources", sources.len(), angles.len());
    Ok(sources)
}

/// Significant poles of a circle fit with |ζ| < 1.
fn circle_interior_poles(fit: &ContinuumApprox) -> Vec<Complex64> {
    fit.significant_poles().poles.into_iter().filter(|p| p.norm() < INTERIOR_RADIUS).collect()
}

pub fn solve_scattering(p: &ScatteringProblem) -> Result<(MfsSolution, PipelineDiagnostics)> {
    solve_scattering_cached(p, None)
}

pub fn solve_scattering_cached(p: &ScatteringProblem, cache: Option<&StageCache>) -> Result<(MfsSolution, PipelineDiagnostics)> {
    let (g, inc, o) = (&p.curve, &p.incident, &p.options);
    inc.check_exterior(g)?;
    let mut times = Vec::new();
    let v = |t: f64| inc.eval(g.point(t)).re;

    let map = stage(2, "conformal map", &mut times, || map_for(g, o.tol_map, cache))?;
    let seed3 = if o.recycle { map.support_params.clone() } else { vec![] };
    let seed_counts0 = seed3.len();
    let circle_fit = stage(3, "circle fit", &mut times, || fit_on(&unit_circle(), o.tol_circle, o.mmax, seed3, v))?;
    let q = circle_interior_poles(&circle_fit);
    let mut gamma = stage(4, "shielding curve", &mut times, || build_shield(&q, &map.interior_zeros_dm, o.shrink))?;
    let seed6 = if o.recycle { circle_fit.support_params.clone() } else { vec![] };
    let seed_counts1 = seed6.len();
    let gamma_fit = stage(6, "boundary fit", &mut times, || fit_on(g, o.tol_circle, o.mmax, seed6, v))?;
    let support_angles: Vec<f64> = gamma_fit.support_params.iter().map(|t| PI * t).collect();
    let sources = stage(8, "source placement", &mut times, || {
        match place_sources(&map, &gamma, &support_angles, g) {
            // a source fell outside Γ: lift γ off the critical circle of M, and
            // failing that drop the stragglers
            Err(Error::Placement(_)) => {
                let raised = gamma.raised(conformal::zero_floor(&map.interior_zeros_dm));
                place_sources(&map, &raised, &support_angles, g)
                    .inspect(|_| gamma = raised)
                    .or_else(|_| place_inside(&map, &gamma, &support_angles, g))
            }
            r => r,
        }
    })?;

    let collocation = gap_samples(&gamma_fit.support_params, o.per_gap());
    let (sol, residual) = stage(9, "least squares", &mut times, || {
        let pts: Vec<Complex64> = collocation.iter().map(|&t| g.point(t)).collect();
        let asm = assemble(&sources, &pts, inc.k, o.order)?;
        let rhs: Vec<Complex64> = pts.iter().map(|&z| inc.eval(z)).collect();
        let ls = mfs::solve_ls(&asm, &rhs)?;
        let sol = MfsSolution::from_assembly(sources.clone(), o.order, inc.k, asm, ls);
        let res = boundary_residual(&sol, g, inc, &collocation, o.refine_check);
        Ok((sol, res))
    })?;
    let degraded = !(residual <= DEGRADED_RESIDUAL);
    if degraded {
        log::warn!("boundary residual {residual:.3e} exceeds {DEGRADED_RESIDUAL:.0e}");
    }
    info!(
        "{}: k = {}, J = {}, N = {}, residual {residual:.3e}",
        g.label(),
        inc.k,
        sources.len(),
        collocation.len()
    );
    let diag = PipelineDiagnostics {
        curve: g.label().to_string(),
        k: inc.k,
        map_degree: map.degree(),
        v_circle_degree: circle_fit.degree(),
        v_gamma_degree: gamma_fit.degree(),
        q,
        o: map.interior_zeros_dm.clone(),
        gamma_knots: gamma.knots.clone(),
        support_angles,
        source_count: sources.len(),
        sources,
        sample_count: collocation.len(),
        unknowns: sol.unknowns(),
        rank: sol.rank,
        boundary_residual: residual,
        degraded,
        recycled_support_counts: [0, seed_counts0, seed_counts1],
        wall_times: times,
    };
    Ok((sol, diag))
}

/// Exact sound-soft scattered field of a plane wave off the unit disk, in the
/// physical convention u_s = −u_inc on |z| = 1.
pub fn exact_disk_scatter(k: f64, angle: f64, points: &[Complex64]) -> Result<Vec<Complex64>> {
    exact_disk_scatter_with(k, angle, points, disk_truncation(k))
}

pub fn disk_truncation(k: f64) -> u32 {
    (k + 8.0 * k.cbrt() + 20.0).ceil() as u32
}

/// [`exact_disk_scatter`] with an explicit truncation order |n| ≤ `nmax`.
pub fn exact_disk_scatter_with(k: f64, angle: f64, points: &[Complex64], nmax: u32) -> Result<Vec<Complex64>> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
    }
    let jk = bessel_j_seq(nmax, k)?;
    let hk = hankel1_seq(nmax, k)?;
    let ratio: Vec<Complex64> = jk.iter().zip(&hk).map(|(j, h)| *j / h).collect();
    points
        .iter()
        .map(|&z| {
            let r = z.norm();
            if r < 1.0 - 1e-14 {
                return Err(Error::Domain(format!("point {z} lies inside the unit disk")));
            }
            let psi = z.arg() - angle;
            let hr = hankel1_seq(nmax, k * r)?;
            // n and −n terms combine: i^n (J_n/H_n) H_n(kr) 2cos(nψ)
            let mut sum = ratio[0] * hr[0];
            let mut abs_sum = sum.norm();
            let mut last = 0.0;
            let mut ipow = Complex64::new(1.0, 0.0);
            for n in 1..=nmax as usize {
                ipow *= Complex64::i();
                let term = ipow * ratio[n] * hr[n] * (2.0 * (n as f64 * psi).cos());
                sum += term;
                abs_sum += term.norm();
                last = term.norm();
            }
            if !(last <= 1e-15 * abs_sum) {
                return Err(Error::Truncation(format!("last term {last:.3e} at |n| = {nmax} for z = {z}")));
            }
            Ok(-sum)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub j: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of ln(residual) against J over the pre-plateau rows.
    pub slope: f64,
    pub r_squared: f64,
    pub fit_rows: usize,
}

/// Boundary residual against source count. The map and shielding curve come
/// from the full pipeline; for each J the sources sit at J equispaced conformal
/// angles on √γ.
pub fn convergence_study(
    curve: &ParametricCurve,
    incident: &IncidentField,
    j_list: &[usize],
    options: &ScatteringOptions,
) -> Result<StudySummary> {
    if j_list.is_empty() {
        return Err(Error::InvalidInput("empty J list".into()));
    }
    incident.check_exterior(curve)?;
    let map = fit_map(curve, options.tol_map)?;
    let v = |t: f64| incident.eval(curve.point(t)).re;
    let circle_fit = fit_on(&unit_circle(), options.tol_circle, options.mmax, map.support_params.clone(), v)?;
    let gamma = build_shield(&circle_interior_poles(&circle_fit), &map.interior_zeros_dm, options.shrink)?;
    let mut rows = Vec::with_capacity(j_list.len());
    for &j in j_list {
        if j == 0 {
            return Err(Error::InvalidInput("J must be positive".into()));
        }
        let params: Vec<f64> = (0..j).map(|i| -1.0 + 2.0 * i as f64 / j as f64).collect();
        let angles: Vec<f64> = params.iter().map(|t| PI * t).collect();
        let sources = place_sources(&map, &gamma, &angles, curve)?;
        let collocation = gap_samples(&params, options.per_gap());
        let z: Vec<Complex64> = collocation.iter().map(|&t| curve.point(t)).collect();
        let asm = assemble(&sources, &z, incident.k, options.order)?;
        let rhs: Vec<Complex64> = z.iter().map(|&p| incident.eval(p)).collect();
        let ls = mfs::solve_ls(&asm, &rhs)?;
        let sol = MfsSolution::from_assembly(sources, options.order, incident.k, asm, ls);
        let residual = boundary_residual(&sol, curve, incident, &collocation, options.refine_check);
        debug!("study: J = {j}, residual {residual:.3e}");
        rows.push(StudyRow { j, residual });
    }
    let (slope, r_squared, fit_rows) = preplateau_slope(&rows);
    Ok(StudySummary { rows, slope, r_squared, fit_rows })
}

/// Log-linear fit over rows up to the first one within a factor 100 of the
/// smallest residual.
pub fn preplateau_slope(rows: &[StudyRow]) -> (f64, f64, usize) {
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|r| r.j);
    let floor = sorted.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    let end = sorted.iter().position(|r| r.residual <= 100.0 * floor).map_or(sorted.len(), |i| i + 1);
    let used = &sorted[..end.max(2).min(sorted.len())];
    let xs: Vec<f64> = used.iter().map(|r| r.j as f64).collect();
    let ys: Vec<f64> = used.iter().map(|r| r.residual.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, r2) = linear_fit(&xs, &ys);
    (slope, r2, used.len())
}

/// Slope and coefficient of determination of the least-squares line.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

// ---------------------------------------------------------------- Laplace

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceSide {
    Interior,
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceMode {
    SupportDerived,
    DoublePole,
}

impl FromStr for LaplaceSide {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(Self::Interior),
            "exterior" => Ok(Self::Exterior),
            _ => Err(Error::InvalidInput(format!("side must be interior or exterior, got `{s}`"))),
        }
    }
}

impl FromStr for LaplaceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "support" | "support_derived" => Ok(Self::SupportDerived),
            "double" | "double_pole" => Ok(Self::DoublePole),
            _ => Err(Error::InvalidInput(format!("mode must be support or double, got `{s}`"))),
        }
    }
}

/// Named real boundary data for Laplace problems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceData {
    Zero,
    /// (Re z)²
    ReSquared,
    /// Re z², harmonic everywhere.
    HarmonicQuadratic,
    /// Re √(z − a) with the branch cut on the ray from `a` away from the
    /// origin; equals the principal branch near the origin side of `a`.
    SqrtSingular { a: Complex64 },
}

pub const SQRT_SINGULARITY: Complex64 = Complex64::new(0.95, -0.55);

impl LaplaceData {
    pub fn eval(&self, z: Complex64) -> f64 {
        match *self {
            LaplaceData::Zero => 0.0,
            LaplaceData::ReSquared => z.re * z.re,
            LaplaceData::HarmonicQuadratic => (z * z).re,
            LaplaceData::SqrtSingular { a } => {
                let d = a / a.norm();
                ((-d).sqrt() * ((a - z) / d).sqrt()).re
            }
        }
    }
}

impl FromStr for LaplaceData {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Self::Zero),
            "resq" => Ok(Self::ReSquared),
            "harmonic" => Ok(Self::HarmonicQuadratic),
            "sqrt_singular" => Ok(Self::SqrtSingular { a: SQRT_SINGULARITY }),
            _ => Err(Error::InvalidInput(format!("unknown data `{s}` (zero, resq, harmonic, sqrt_singular)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceOptions {
    /// Tolerance of the data fits on the circle and on Γ.
    pub tol: f64,
    pub tol_map: f64,
    /// Geometry-driven data wants γ hugging the singularities, so the default
    /// is the pure radial envelope (no convex-hull blend).
    pub shrink: f64,
    pub poly_degree: usize,
    pub refine_check: usize,
    pub mmax: usize,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            tol_map: conformal::DEFAULT_MAP_TOL,
            shrink: 1.0,
            poly_degree: LAPLACE_POLY_DEGREE,
            refine_check: mfs::REFINE_CHECK,
            mmax: 300,
        }
    }
}

#[derive(Clone)]
pub struct LaplaceProblem {
    pub curve: ParametricCurve,
    pub data: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
    pub side: LaplaceSide,
    pub mode: LaplaceMode,
    pub options: LaplaceOptions,
}

impl LaplaceProblem {
    pub fn new(curve: ParametricCurve, data: LaplaceData, side: LaplaceSide, mode: LaplaceMode) -> Self {
        Self { curve, data: Arc::new(move |z| data.eval(z)), side, mode, options: LaplaceOptions::default() }
    }
}

/// f(z) = Re(Σ_k a_k/(z−p_k) [+ b_k/(z−p_k)²] + Σ_m c_m w^m), with w = z − z_c
/// (interior) or w = 1/(z − z_c) (exterior), normalized to |w| ≲ 1 on Γ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceSolution {
    pub poles: Vec<Complex64>,
    pub double: bool,
    pub side: LaplaceSide,
    pub center: Complex64,
    pub w_scale: f64,
    pub poly_degree: usize,
    /// Real coefficients, one per basis column.
    pub coeffs: Vec<f64>,
    pub scale_factors: Vec<f64>,
}

impl LaplaceSolution {
    fn w(&self, z: Complex64) -> Complex64 {
        match self.side {
            LaplaceSide::Interior => (z - self.center) / self.w_scale,
            LaplaceSide::Exterior => self.w_scale / (z - self.center),
        }
    }

    fn basis(&self, z: Complex64, out: &mut Vec<f64>) {
        out.clear();
        for p in &self.poles {
            let u = 1.0 / (z - p);
            out.extend([u.re, u.im]);
            if self.double {
                let u2 = u * u;
                out.extend([u2.re, u2.im]);
            }
        }
        out.push(1.0);
        let w = self.w(z);
        let mut wm = Complex64::new(1.0, 0.0);
        for _ in 0..self.poly_degree {
            wm *= w;
            out.extend([wm.re, wm.im]);
        }
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        let mut b = Vec::with_capacity(self.coeffs.len());
        self.basis(z, &mut b);
        b.iter().zip(&self.coeffs).zip(&self.scale_factors).map(|((v, c), s)| v * c / s).sum()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaplaceDiagnostics {
    pub curve: String,
    pub side: LaplaceSide,
    pub mode: LaplaceMode,
    pub map_degree: Option<usize>,
    pub v_degree: usize,
    pub v_error: f64,
    pub support_count: usize,
    pub aaa_poles: Vec<Complex64>,
    pub pole_count: usize,
    pub gamma_knots: Vec<(f64, f64)>,
    pub sample_count: usize,
    pub unknowns: usize,
    pub rank: usize,
    pub boundary_residual: f64,
    pub degraded: bool,
    pub wall_times: Vec<StageTime>,
}

fn on_side(curve: &ParametricCurve, side: LaplaceSide, p: Complex64) -> bool {
    // poles must sit in the complement of the solution domain
    match side {
        LaplaceSide::Exterior => curve.contains(p),
        LaplaceSide::Interior => !curve.contains(p),
    }
}

pub fn solve_laplace(p: &LaplaceProblem) -> Result<(LaplaceSolution, LaplaceDiagnostics)> {
    let (g, o) = (&p.curve, &p.options);
    let data = p.data.clone();
    let v = move |t: f64| data(g.point(t));
    let mut times = Vec::new();

    let mut map_degree = None;
    let mut knots = Vec::new();
    let (poles, fit) = match p.mode {
        LaplaceMode::SupportDerived => {
            let map = stage(2, "conformal map", &mut times, || fit_map(g, o.tol_map))?;
            map_degree = Some(map.degree());
            let circle_fit =
                stage(3, "circle fit", &mut times, || fit_on(&unit_circle(), o.tol, o.mmax, map.support_params.clone(), &v))?;
            let gamma = stage(4, "shielding curve", &mut times, || {
                let sig = circle_fit.significant_poles().poles;
                // interior problems reflect exterior singularities into the disk
                let reflect = |z: &Complex64| 1.0 / z.conj();
                let (q, zeros): (Vec<Complex64>, Vec<Complex64>) = match p.side {
                    LaplaceSide::Exterior => {
                        (sig.into_iter().filter(|z| z.norm() < INTERIOR_RADIUS).collect(), map.interior_zeros_dm.clone())
                    }
                    LaplaceSide::Interior => (
                        sig.iter().filter(|z| z.norm() > 1.0 / INTERIOR_RADIUS).map(reflect).collect(),
                        map.exterior_zeros_dm.iter().map(reflect).collect(),
                    ),
                };
                Ok(build_shield(&q, &zeros, o.shrink)?.raised(conformal::zero_floor(&zeros)))
            })?;
            knots = gamma.knots.clone();
            let fit = stage(6, "boundary fit", &mut times, || fit_on(g, o.tol, o.mmax, circle_fit.support_params.clone(), &v))?;
            let poles = stage(8, "pole placement", &mut times, || place_laplace_poles(&map, &gamma, &fit.support_params, g, p.side))?;
            (poles, fit)
        }
        LaplaceMode::DoublePole => {
            let fit = stage(6, "boundary fit", &mut times, || fit_on(g, o.tol, o.mmax, vec![], &v))?;
            let poles: Vec<Complex64> =
                fit.significant_poles().poles.into_iter().filter(|z| z.is_finite() && on_side(g, p.side, *z)).collect();
            (poles, fit)
        }
    };
    let double = p.mode == LaplaceMode::DoublePole;
    let center = g.centroid();
    let dists: Vec<f64> = g.sample(1024).iter().map(|z| (z - center).norm()).collect();
    let w_scale = match p.side {
        LaplaceSide::Interior => dists.iter().cloned().fold(0.0, f64::max),
        LaplaceSide::Exterior => dists.iter().cloned().fold(f64::INFINITY, f64::min),
    };
    let mut sol = LaplaceSolution {
        poles: poles.clone(),
        double,
        side: p.side,
        center,
        w_scale,
        poly_degree: o.poly_degree,
        coeffs: vec![],
        scale_factors: vec![],
    };
    let unknowns = poles.len() * if double { 4 } else { 2 } + 2 * o.poly_degree + 1;

    // collocation: the adaptive samples, refined until twice overdetermined
    let mut collocation = refine_params(&fit.samples, 2);
    while collocation.len() < 2 * unknowns {
        collocation = refine_params(&collocation, 2);
    }
    let (rank, residual) = stage(9, "least squares", &mut times, || {
        let pts: Vec<Complex64> = collocation.iter().map(|&t| g.point(t)).collect();
        let mut a = Mat::<f64>::zeros(pts.len(), unknowns);
        let mut row = Vec::with_capacity(unknowns);
        for (i, z) in pts.iter().enumerate() {
            sol.basis(*z, &mut row);
            for (c, val) in row.iter().enumerate() {
                a[(i, c)] = *val;
            }
        }
        let mut scale = vec![1.0; unknowns];
        for (c, s) in scale.iter_mut().enumerate() {
            let m = (0..pts.len()).fold(0.0f64, |m, i| m.max(a[(i, c)].abs()));
            if m > 0.0 {
                *s = m;
                for i in 0..pts.len() {
                    a[(i, c)] /= m;
                }
            }
        }
        let rhs: Vec<f64> = pts.iter().map(|&z| (p.data)(z)).collect();
        let ls = lstsq_real(a.as_ref(), &rhs)?;
        sol.coeffs = ls.x;
        sol.scale_factors = scale;
        let check = refine_params(&collocation, o.refine_check);
        let res = check.iter().map(|&t| {
            let z = g.point(t);
            (sol.eval(z) - (p.data)(z)).abs()
        });
        Ok((ls.rank, res.fold(0.0f64, |m, e| if e.is_finite() { m.max(e) } else { f64::INFINITY })))
    })?;
    let diag = LaplaceDiagnostics {
        curve: g.label().to_string(),
        side: p.side,
        mode: p.mode,
        map_degree,
        v_degree: fit.degree(),
        v_error: fit.max_error,
        support_count: fit.support_params.len(),
        aaa_poles: fit.significant_poles().poles,
        pole_count: poles.len(),
        gamma_knots: knots,
        sample_count: collocation.len(),
        unknowns,
        rank,
        boundary_residual: residual,
        degraded: !(residual <= DEGRADED_RESIDUAL),
        wall_times: times,
    };
    info!("laplace {}: {} poles, residual {residual:.3e}", g.label(), poles.len());
    Ok((sol, diag))
}

/// Support-derived Laplace poles: M(√ρ e^{iθ}) for exterior problems and the
/// reflected M(e^{iθ}/√ρ) for interior ones.
fn place_laplace_poles(
    map: &ConformalMap,
    gamma: &ShieldingCurve,
    support_params: &[f64],
    g: &ParametricCurve,
    side: LaplaceSide,
) -> Result<Vec<Complex64>> {
    support_params
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let th = PI * t;
            let r = gamma.radius(th).sqrt();
            let zeta = match side {
                LaplaceSide::Exterior => Complex64::from_polar(r, th),
                LaplaceSide::Interior => Complex64::from_polar(1.0 / r, th),
            };
            let p = map.eval(zeta);
            if !p.is_finite() || !on_side(g, side, p) {
                return Err(Error::Placement(format!("pole {j} (θ = {th:.6}) maps to {p} on the wrong side of Γ")));
            }
            Ok(p)
        })
        .collect()
}
