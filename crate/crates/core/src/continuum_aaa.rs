//! Continuum AAA on a parametric curve.
//!
//! The sample set is generated on the fly: every gap between consecutive
//! support points (in parameter order) keeps at least [`SAMPLES_PER_GAP`]
//! working samples, and a candidate approximant is accepted only after its
//! error is checked on a grid seven times finer than the working samples.
//! Function values are cached by parameter, so no point is evaluated twice.

use std::collections::HashMap;

use log::{debug, warn};
use num_complex::Complex64;

use crate::aaa::loewner_weights;
use crate::barycentric::{BarycentricRational, PoleSet, SPURIOUS_RESIDUE};
use crate::curve::ParametricCurve;
use crate::error::{Error, Result};

pub const INITIAL_GRID: usize = 16;
pub const SAMPLES_PER_GAP: usize = 3;
pub const CHECK_FACTOR: usize = 7;
/// Cap on check-grid failures promoted to working samples per sweep.
pub const MAX_INSERTIONS: usize = 64;

#[derive(Clone, Debug)]
pub struct AaazpOptions {
    pub mmax: usize,
    pub tol: f64,
    pub lawson: bool,
    pub meromorphic: bool,
    pub deriv_order: u8,
    /// Parameters used as the first support points.
    pub initial_support: Vec<f64>,
}

impl Default for AaazpOptions {
    fn default() -> Self {
        Self { mmax: 300, tol: 1e-13, lawson: false, meromorphic: true, deriv_order: 0, initial_support: Vec::new() }
    }
}

impl AaazpOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Clone, Debug)]
pub struct ContinuumApprox {
    pub approx: BarycentricRational,
    pub poles: PoleSet,
    /// Curve parameter of each support point, in the order of `approx.support()`.
    pub support_params: Vec<f64>,
    /// Working sample parameters, sorted.
    pub samples: Vec<f64>,
    /// Error on the 7×-finer check grid (relative to nothing; compare with `tol * norm`).
    pub max_error: f64,
    /// Max |f| over all evaluated points.
    pub norm: f64,
    pub converged: bool,
    pub refinement_rounds: usize,
    pub meromorphic: bool,
    pub deriv_order: u8,
    pub evaluations: usize,
}

impl ContinuumApprox {
    pub fn degree(&self) -> usize {
        self.approx.degree()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.approx.eval(z)
    }

    /// Derivative of the approximant, limited to the requested `deriv_order`.
    pub fn derivative(&self, z: Complex64, order: u8) -> Result<Complex64> {
        if order > self.deriv_order {
            return Err(Error::InvalidInput(format!(
                "derivative of order {order} requested, fit prepared for {}",
                self.deriv_order
            )));
        }
        self.approx.derivative(z, order)
    }

    /// Poles whose residue is not negligible relative to the data.
    pub fn significant_poles(&self) -> PoleSet {
        self.poles.significant(SPURIOUS_RESIDUE, self.norm)
    }

    /// Poles inside `curve`. Only meaningful as singularity indicators when
    /// the fit was flagged meromorphic.
    pub fn interior_poles(&self, curve: &ParametricCurve) -> (Vec<Complex64>, bool) {
        let inside = self.significant_poles().poles.into_iter().filter(|p| curve.contains(*p)).collect();
        (inside, self.meromorphic)
    }
}

/// Wraps a parameter into [−1, 1).
pub fn wrap(t: f64) -> f64 {
    if (-1.0..1.0).contains(&t) {
        return t;
    }
    let w = (t + 1.0).rem_euclid(2.0) - 1.0;
    if w >= 1.0 {
        -1.0
    } else {
        w
    }
}

struct Samples<'a, F> {
    f: &'a F,
    curve: &'a ParametricCurve,
    cache: HashMap<u64, (Complex64, Complex64)>,
    t: Vec<f64>,
    z: Vec<Complex64>,
    v: Vec<Complex64>,
    norm: f64,
}

impl<'a, F> Samples<'a, F>
where
    F: Fn(f64, Complex64) -> Complex64 + Sync,
{
    fn lookup(&mut self, ts: &[f64]) -> Result<Vec<(Complex64, Complex64)>> {
        let missing: Vec<f64> = ts.iter().copied().filter(|t| !self.cache.contains_key(&t.to_bits())).collect();
        let fresh = eval_all(self.f, self.curve, &missing);
        for (t, zv) in missing.iter().zip(fresh) {
            if !zv.1.is_finite() || !zv.0.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite function value at t = {t}")));
            }
            self.norm = self.norm.max(zv.1.norm());
            self.cache.insert(t.to_bits(), zv);
        }
        Ok(ts.iter().map(|t| self.cache[&t.to_bits()]).collect())
    }

    /// Inserts parameters into the sorted working set; returns how many were new.
    fn insert(&mut self, ts: &[f64]) -> Result<usize> {
        let ts: Vec<f64> = ts.iter().map(|&t| wrap(t)).collect();
        let vals = self.lookup(&ts)?;
        let mut added = 0;
        for (t, (z, v)) in ts.into_iter().zip(vals) {
            match self.t.binary_search_by(|x| x.total_cmp(&t)) {
                Ok(_) => {}
                Err(pos) => {
                    let n = self.t.len();
                    if n > 0 {
                        for nb in [self.z[pos % n], self.z[(pos + n - 1) % n]] {
                            if nb == z {
                                return Err(Error::CurveDegenerate(format!("coincident curve points at t = {t}")));
                            }
                        }
                    }
                    self.t.insert(pos, t);
                    self.z.insert(pos, z);
                    self.v.insert(pos, v);
                    added += 1;
                }
            }
        }
        Ok(added)
    }

    fn index_of(&self, t: f64) -> usize {
        self.t.binary_search_by(|x| x.total_cmp(&t)).expect("support point is a working sample")
    }
}

#[cfg(feature = "parallel")]
fn eval_all<F>(f: &F, curve: &ParametricCurve, ts: &[f64]) -> Vec<(Complex64, Complex64)>
where
    F: Fn(f64, Complex64) -> Complex64 + Sync,
{
    use rayon::prelude::*;
    ts.par_iter()
        .map(|&t| {
            let z = curve.point(t);
            (z, f(t, z))
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_all<F>(f: &F, curve: &ParametricCurve, ts: &[f64]) -> Vec<(Complex64, Complex64)>
where
    F: Fn(f64, Complex64) -> Complex64 + Sync,
{
    ts.iter()
        .map(|&t| {
            let z = curve.point(t);
            (z, f(t, z))
        })
        .collect()
}

/// Length of the periodic parameter interval from `a` forward to `b`.
fn forward_gap(a: f64, b: f64) -> f64 {
    let d = b - a;
    if d <= 0.0 {
        d + 2.0
    } else {
        d
    }
}

/// Adaptive continuum AAA of `f(t, Γ(t))` on `curve`.
pub fn aaazp<F>(f: F, curve: &ParametricCurve, opts: &AaazpOptions) -> Result<ContinuumApprox>
where
    F: Fn(f64, Complex64) -> Complex64 + Sync,
{
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if opts.deriv_order > 2 {
        return Err(Error::InvalidInput(format!("deriv_order must be ≤ 2, got {}", opts.deriv_order)));
    }
    if opts.lawson {
        warn!("aaazp: Lawson iterations are not implemented; ignoring");
    }

    let mut s = Samples { f: &f, curve, cache: HashMap::new(), t: Vec::new(), z: Vec::new(), v: Vec::new(), norm: 0.0 };
    s.insert(&ParametricCurve::params(INITIAL_GRID))?;

    let mut support: Vec<f64> = Vec::new();
    for &t in &opts.initial_support {
        let t = wrap(t);
        if !support.contains(&t) {
            support.push(t);
        }
    }
    s.insert(&support)?;

    let mut weights: Vec<Complex64>;
    let mut refinement_rounds = 0;
    let mut converged = false;
    let mut max_error;

    if support.is_empty() {
        let mean: Complex64 = s.v.iter().sum::<Complex64>() / s.v.len() as f64;
        let first = argmax(s.v.iter().map(|v| (v - mean).norm()));
        support.push(s.t[first]);
    }

    loop {
        ensure_gap_samples(&mut s, &support)?;

        let idx: Vec<usize> = support.iter().map(|&t| s.index_of(t)).collect();
        let mut is_support = vec![false; s.t.len()];
        for &i in &idx {
            is_support[i] = true;
        }
        let rows: Vec<usize> = (0..s.t.len()).filter(|&i| !is_support[i]).collect();
        weights = loewner_weights(&s.z, &s.v, &idx, &rows)?;
        let r = build(&s, &idx, &weights)?;

        let err: Vec<f64> = (0..s.t.len())
            .map(|i| if is_support[i] { 0.0 } else { (r.eval(s.z[i]) - s.v[i]).norm() })
            .collect();
        max_error = err.iter().fold(0.0f64, |m, &e| m.max(e));
        let thresh = opts.tol * s.norm;

        if max_error <= thresh {
            let (check_err, failing) = check_grid(&mut s, &r, opts.tol)?;
            max_error = check_err;
            if failing.is_empty() {
                converged = true;
                break;
            }
            refinement_rounds += 1;
            debug!("aaazp: check grid failed at {} points (max {:.3e}); refining", failing.len(), check_err);
            s.insert(&failing)?;
            continue;
        }
        if support.len() > opts.mmax {
            break;
        }
        support.push(s.t[argmax(err.iter().copied())]);
    }

    let idx: Vec<usize> = support.iter().map(|&t| s.index_of(t)).collect();
    let approx = build(&s, &idx, &weights)?;
    let poles = if approx.degree() > 0 { approx.poles_zeros_residues()? } else { PoleSet::default() };
    if !converged {
        warn!("aaazp: degree limit {} reached with error {:.3e} (tol {:.1e})", opts.mmax, max_error, opts.tol * s.norm);
    }
    debug!(
        "aaazp: degree {} samples {} error {:.3e} evaluations {}",
        approx.degree(),
        s.t.len(),
        max_error,
        s.cache.len()
    );
    Ok(ContinuumApprox {
        approx,
        poles,
        support_params: support,
        samples: s.t.clone(),
        max_error,
        norm: s.norm,
        converged,
        refinement_rounds,
        meromorphic: opts.meromorphic,
        deriv_order: opts.deriv_order,
        evaluations: s.cache.len(),
    })
}

fn argmax(it: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, e) in it.enumerate() {
        if e > best.1 {
            best = (i, e);
        }
    }
    best.0
}

fn build<F>(s: &Samples<'_, F>, idx: &[usize], w: &[Complex64]) -> Result<BarycentricRational> {
    BarycentricRational::new(idx.iter().map(|&i| s.z[i]).collect(), idx.iter().map(|&i| s.v[i]).collect(), w.to_vec())
}

/// Tops up every gap between consecutive support parameters to at least
/// [`SAMPLES_PER_GAP`] interior working samples, using quartile points.
fn ensure_gap_samples<F>(s: &mut Samples<'_, F>, support: &[f64]) -> Result<()>
where
    F: Fn(f64, Complex64) -> Complex64 + Sync,
{
    let mut sorted = support.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut new = Vec::new();
    for (i, &a) in sorted.iter().enumerate() {
        let b = sorted[(i + 1) % sorted.len()];
        let len = forward_gap(a, b);
        let inside: Vec<f64> = s
            .t
            .iter()
            .map(|&t| forward_gap(a, t))
            .filter(|&d| d > 0.0 && d < len && sorted.len() > 1 || (sorted.len() == 1 && d > 0.0 && d < 2.0))
            .collect();
        if inside.len() >= SAMPLES_PER_GAP {
            continue;
        }
        for q in 1..=SAMPLES_PER_GAP {
            let d = len * q as f64 / (SAMPLES_PER_GAP + 1) as f64;
            if inside.iter().all(|&x| (x - d).abs() > len / (4 * (SAMPLES_PER_GAP + 1)) as f64) {
                new.push(a + d);
            }
        }
    }
    s.insert(&new)?;
    Ok(())
}

/// Error on a grid [`CHECK_FACTOR`] times finer than the working samples.
/// Returns the max error and the (at most [`MAX_INSERTIONS`]) worst failing parameters.
fn check_grid<F>(s: &mut Samples<'_, F>, r: &BarycentricRational, tol: f64) -> Result<(f64, Vec<f64>)>
where
    F: Fn(f64, Complex64) -> Complex64 + Sync,
{
    let n = s.t.len();
    let mut ts = Vec::with_capacity(n * (CHECK_FACTOR - 1));
    for i in 0..n {
        let (a, len) = (s.t[i], forward_gap(s.t[i], s.t[(i + 1) % n]));
        for q in 1..CHECK_FACTOR {
            ts.push(wrap(a + len * q as f64 / CHECK_FACTOR as f64));
        }
    }
    let vals = s.lookup(&ts)?;
    let mut errs: Vec<(f64, f64)> = ts.iter().zip(&vals).map(|(&t, (z, v))| ((r.eval(*z) - v).norm(), t)).collect();
    let max = errs.iter().fold(0.0f64, |m, e| m.max(e.0));
    // the check points may have raised the norm
    let thresh = tol * s.norm;
    errs.retain(|e| e.0 > thresh);
    errs.sort_by(|a, b| b.0.total_cmp(&a.0));
    errs.truncate(MAX_INSERTIONS);
    Ok((max, errs.into_iter().map(|e| e.1).collect()))
}
