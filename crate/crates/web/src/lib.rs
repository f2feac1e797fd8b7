//! WebAssembly bindings for the browser demo: solve a sound-soft scattering
//! problem on a library curve, sample its field on a grid, and compare with
//! the exact unit-disk series.

use aaals::curve::ParametricCurve;
use aaals::curves::{make_curve, CurveSpec};
use aaals::mfs::{IncidentField, MfsSolution};
use aaals::pipeline::{exact_disk_scatter, solve_scattering, PipelineDiagnostics, ScatteringOptions, ScatteringProblem};
use aaals::Complex64;
use wasm_bindgen::prelude::*;

/// A solved problem held on the Rust side between calls.
#[wasm_bindgen]
pub struct Scatterer {
    curve: ParametricCurve,
    incident: IncidentField,
    solution: MfsSolution,
    diagnostics: PipelineDiagnostics,
}

impl Scatterer {
    pub fn solve(curve: &str, k: f64, angle: f64) -> aaals::Result<Scatterer> {
        let curve = make_curve(&curve.parse::<CurveSpec>()?)?;
        let incident = IncidentField::plane_wave(k, angle)?;
        let problem = ScatteringProblem { curve: curve.clone(), incident: incident.clone(), options: ScatteringOptions::default() };
        let (solution, diagnostics) = solve_scattering(&problem)?;
        Ok(Scatterer { curve, incident, solution, diagnostics })
    }

    /// Physical field at `z`, zero on Γ when `total`: the solver matches
    /// `u_inc` on Γ, so the scattered field is its negative. `None` inside Γ.
    pub fn value(&self, z: Complex64, total: bool) -> Option<Complex64> {
        if self.curve.contains(z) {
            return None;
        }
        let scattered = -self.solution.eval(z);
        Some(if total { scattered + self.incident.eval(z) } else { scattered })
    }
}

#[wasm_bindgen]
impl Scatterer {
    #[wasm_bindgen(constructor)]
    pub fn new(curve: &str, k: f64, angle: f64) -> Result<Scatterer, JsError> {
        Scatterer::solve(curve, k, angle).map_err(|e| JsError::new(&e.to_string()))
    }

    pub fn residual(&self) -> f64 {
        self.diagnostics.boundary_residual
    }

    pub fn degraded(&self) -> bool {
        self.diagnostics.degraded
    }

    pub fn unknowns(&self) -> usize {
        self.diagnostics.unknowns
    }

    /// Source locations as interleaved `x, y` pairs.
    pub fn sources(&self) -> Vec<f64> {
        interleave(&self.diagnostics.sources)
    }

    /// `n` boundary points as interleaved `x, y` pairs.
    pub fn outline(&self, n: usize) -> Vec<f64> {
        interleave(&self.curve.sample(n))
    }

    /// Real part of [`Scatterer::value`] on an `nx × ny` grid over the box, row-major
    /// from `y_min`; nodes inside the obstacle are `NaN`.
    #[allow(clippy::too_many_arguments)]
    pub fn field(&self, nx: usize, ny: usize, x_min: f64, x_max: f64, y_min: f64, y_max: f64, total: bool) -> Vec<f64> {
        grid(nx, ny, [x_min, x_max, y_min, y_max]).map(|z| self.value(z, total).map_or(f64::NAN, |v| v.re)).collect()
    }
}

/// Real part of the exact scattered (or total) field of the unit disk, in the
/// convention and layout of [`Scatterer::field`].
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn disk_field(k: f64, angle: f64, nx: usize, ny: usize, x_min: f64, x_max: f64, y_min: f64, y_max: f64, total: bool) -> Result<Vec<f64>, JsError> {
    disk_values(k, angle, nx, ny, [x_min, x_max, y_min, y_max], total).map_err(|e| JsError::new(&e.to_string()))
}

pub fn disk_values(k: f64, angle: f64, nx: usize, ny: usize, bbox: [f64; 4], total: bool) -> aaals::Result<Vec<f64>> {
    let incident = IncidentField::plane_wave(k, angle)?;
    let pts: Vec<Complex64> = grid(nx, ny, bbox).collect();
    let outside: Vec<Complex64> = pts.iter().copied().filter(|z| z.norm() >= 1.0).collect();
    let mut us = exact_disk_scatter(k, angle, &outside)?.into_iter();
    Ok(pts
        .iter()
        .map(|&z| match z.norm() >= 1.0 {
            true => {
                let u = us.next().unwrap_or_default();
                (if total { u + incident.eval(z) } else { u }).re
            }
            false => f64::NAN,
        })
        .collect())
}

/// Names accepted by [`Scatterer::new`], comma separated.
#[wasm_bindgen]
pub fn curve_names() -> String {
    "circle,ellipse,starfish,trefoil,crescent_gc,corral,sharktooth,pacman,random".into()
}

fn grid(nx: usize, ny: usize, [x_min, x_max, y_min, y_max]: [f64; 4]) -> impl Iterator<Item = Complex64> {
    let step = |lo: f64, hi: f64, n: usize, i: usize| if n > 1 { lo + (hi - lo) * i as f64 / (n - 1) as f64 } else { 0.5 * (lo + hi) };
    (0..ny).flat_map(move |j| (0..nx).map(move |i| Complex64::new(step(x_min, x_max, nx, i), step(y_min, y_max, ny, j))))
}

fn interleave(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|z| [z.re, z.im]).collect()
}
