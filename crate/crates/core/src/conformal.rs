//! Boundary map M: unit circle → Γ, the Schwarz function of Γ, and the
//! shielding curve γ that bounds detected singularities in the ζ-plane.

use std::f64::consts::PI;

use log::debug;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::aaa::aaa_fit;
use crate::barycentric::BarycentricRational;
use crate::continuum_aaa::{aaazp, AaazpOptions, ContinuumApprox};
use crate::curve::ParametricCurve;
use crate::error::{Error, Result};

pub const DEFAULT_MAP_TOL: f64 = 1e-8;
pub const DEFAULT_SCHWARZ_TOL: f64 = 1e-13;
/// Loose tolerance for the discrete fit whose zeros locate the zeros of M′.
pub const DERIVATIVE_ZERO_TOL: f64 = 1e-3;
/// |ζ| below this counts as interior to the unit circle.
pub const INTERIOR_RADIUS: f64 = 1.0 - 1e-10;
pub const RHO_MIN: f64 = 1e-3;
pub const RHO_MAX: f64 = 1.0 - 1e-3;
pub const DEFAULT_RHO: f64 = 0.5;

pub fn unit_circle() -> ParametricCurve {
    ParametricCurve::circle(Complex64::new(0.0, 0.0), 1.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConformalMap {
    pub m_approx: BarycentricRational,
    /// Zeros of M′ inside the unit circle.
    pub interior_zeros_dm: Vec<Complex64>,
    /// Zeros of M′ outside the unit circle (placement constraints for
    /// interior problems).
    #[serde(default)]
    pub exterior_zeros_dm: Vec<Complex64>,
    /// Circle parameters generated while fitting.
    pub circle_samples: Vec<f64>,
    /// Parameters of the map's support points, reusable as a warm start.
    pub support_params: Vec<f64>,
    pub max_error: f64,
}

impl ConformalMap {
    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        self.m_approx.eval(zeta)
    }

    pub fn derivative(&self, zeta: Complex64, order: u8) -> Result<Complex64> {
        self.m_approx.derivative(zeta, order)
    }

    pub fn degree(&self) -> usize {
        self.m_approx.degree()
    }
}

/// Fits M with M(e^{iπt}) = Γ(t) and locates the interior zeros of M′.
pub fn fit_map(g: &ParametricCurve, tol: f64) -> Result<ConformalMap> {
    let circle = unit_circle();
    let opts = AaazpOptions { deriv_order: 2, ..AaazpOptions::with_tol(tol) };
    let fit = aaazp(|t, _| g.point(t), &circle, &opts)?;
    if !fit.converged {
        return Err(Error::Map(format!("map fit did not reach tolerance {tol:.1e} (error {:.3e})", fit.max_error)));
    }
    let zs: Vec<Complex64> = fit.samples.iter().map(|&t| Complex64::from_polar(1.0, PI * t)).collect();
    let dm: Vec<Complex64> = zs.iter().map(|&z| fit.approx.derivative(z, 1)).collect::<Result<_>>()?;
    let dm_scale = dm.iter().fold(0.0f64, |m, d| m.max(d.norm()));
    if let Some(i) = dm.iter().position(|d| !(d.norm() >= 1e-10 * dm_scale)) {
        return Err(Error::Map(format!("|M′| vanishes on the circle near t = {:.6}", fit.samples[i])));
    }
    let zeros = aaa_fit(&dm, &zs, DERIVATIVE_ZERO_TOL, zs.len().min(100) - 1)?;
    let interior_zeros_dm: Vec<Complex64> = zeros.poles.zeros.iter().copied().filter(|z| z.norm() < INTERIOR_RADIUS).collect();
    let exterior_zeros_dm: Vec<Complex64> =
        zeros.poles.zeros.iter().copied().filter(|z| z.is_finite() && z.norm() > 1.0 / INTERIOR_RADIUS).collect();
    debug!("fit_map: degree {} with {} interior zeros of M′", fit.degree(), interior_zeros_dm.len());
    Ok(ConformalMap {
        m_approx: fit.approx,
        interior_zeros_dm,
        exterior_zeros_dm,
        circle_samples: fit.samples,
        support_params: fit.support_params,
        max_error: fit.max_error,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchwarzStructure {
    pub s_approx: BarycentricRational,
    /// Significant poles inside Γ; their streams delineate branch cuts.
    pub interior_poles: Vec<Complex64>,
    pub interior_residues: Vec<Complex64>,
    pub max_error: f64,
    pub support_params: Vec<f64>,
}

/// Continuum AAA fit of conj(z) on Γ to absolute error `tol`.
pub fn schwarz(g: &ParametricCurve, tol: f64) -> Result<SchwarzStructure> {
    // aaazp tolerances are relative to max|conj z|; the margin covers curve
    // points between the scale samples
    let rel = tol / (1.01 * g.scale()).max(1.0);
    let fit: ContinuumApprox = aaazp(|_, z| z.conj(), g, &AaazpOptions::with_tol(rel))?;
    let sig = fit.significant_poles();
    let (interior_poles, interior_residues) =
        sig.poles.iter().zip(&sig.residues).filter(|(p, _)| g.contains(**p)).map(|(p, r)| (*p, *r)).unzip();
    Ok(SchwarzStructure {
        s_approx: fit.approx,
        interior_poles,
        interior_residues,
        max_error: fit.max_error,
        support_params: fit.support_params,
    })
}

/// Periodic radius function ρ(θ) interpolating a conforming polygon with a
/// shape-preserving (PCHIP) cubic.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ShieldingCurve {
    /// Knots (θ_i, ρ_i), θ sorted in [−π, π). Empty means constant `DEFAULT_RHO`.
    pub knots: Vec<(f64, f64)>,
    #[serde(skip)]
    slopes: Vec<f64>,
}

impl ShieldingCurve {
    pub fn constant(rho: f64) -> Self {
        Self::from_knots(vec![(0.0, rho.clamp(RHO_MIN, RHO_MAX))])
    }

    pub fn from_knots(mut knots: Vec<(f64, f64)>) -> Self {
        for k in &mut knots {
            k.0 = wrap_angle(k.0);
            k.1 = k.1.clamp(RHO_MIN, RHO_MAX);
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        knots.dedup_by(|b, a| {
            if (a.0 - b.0).abs() < 1e-14 {
                a.1 = a.1.max(b.1);
                true
            } else {
                false
            }
        });
        let slopes = periodic_pchip_slopes(&knots);
        Self { knots, slopes }
    }

    /// ρ(θ), periodic in θ.
    pub fn radius(&self, theta: f64) -> f64 {
        let k = &self.knots;
        match k.len() {
            0 => DEFAULT_RHO,
            1 => k[0].1,
            n => {
                // slopes are not serialized; recompute after deserialization
                let computed;
                let slopes: &[f64] = if self.slopes.len() == n {
                    &self.slopes
                } else {
                    computed = periodic_pchip_slopes(k);
                    &computed
                };
                let th = wrap_angle(theta);
                // interval [k[i], k[i+1]] with wrap-around
                let i = match k.iter().rposition(|kn| kn.0 <= th) {
                    Some(i) => i,
                    None => n - 1,
                };
                let j = (i + 1) % n;
                let (x0, y0) = k[i];
                let (mut x1, y1) = k[j];
                let mut x = th;
                if j == 0 {
                    x1 += 2.0 * PI;
                }
                if x < x0 {
                    x += 2.0 * PI;
                }
                let h = x1 - x0;
                let s = (x - x0) / h;
                if s == 0.0 {
                    return y0;
                }
                let (h00, h10, h01, h11) = (
                    (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
                    s * (1.0 - s) * (1.0 - s),
                    s * s * (3.0 - 2.0 * s),
                    s * s * (s - 1.0),
                );
                // monotone on each segment; the clamp only removes roundoff
                (h00 * y0 + h10 * h * slopes[i] + h01 * y1 + h11 * h * slopes[j]).clamp(y0.min(y1), y0.max(y1))
            }
        }
    }

    /// True when every point satisfies |ζ| ≤ ρ(arg ζ) + slack.
    pub fn contains_all(&self, pts: &[Complex64], slack: f64) -> bool {
        pts.iter().all(|z| z.norm() <= self.radius(z.arg()) + slack)
    }

    /// The same curve with every knot lifted to at least `floor`, itself
    /// capped at [`RHO_MAX`].
    pub fn raised(&self, floor: f64) -> ShieldingCurve {
        let floor = floor.min(RHO_MAX);
        ShieldingCurve::from_knots(self.knots.iter().map(|&(th, r)| (th, r.max(floor))).collect())
    }
}

/// Radial floor ρ ≥ max|o|² that keeps sources at √ρ outside the critical circle of M.
pub fn zero_floor(o: &[Complex64]) -> f64 {
    o.iter().filter(|z| z.is_finite() && z.norm() < INTERIOR_RADIUS).fold(0.0f64, |m, z| m.max(z.norm_sqr()))
}

/// Angle wrapped into [−π, π).
pub fn wrap_angle(theta: f64) -> f64 {
    if (-PI..PI).contains(&theta) {
        return theta;
    }
    let w = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Fritsch–Carlson derivative estimates (harmonic mean of secants, zero at
/// local extrema) for knots continued periodically across the seam.
fn periodic_pchip_slopes(k: &[(f64, f64)]) -> Vec<f64> {
    let n = k.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let secant = |i: usize| {
        let j = (i + 1) % n;
        let h = if j == 0 { k[0].0 + 2.0 * PI - k[i].0 } else { k[j].0 - k[i].0 };
        (h, (k[j].1 - k[i].1) / h)
    };
    (0..n)
        .map(|i| {
            let (h0, d0) = secant((i + n - 1) % n);
            let (h1, d1) = secant(i);
            if d0 * d1 <= 0.0 {
                0.0
            } else {
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                (w1 + w2) / (w1 / d0 + w2 / d1)
            }
        })
        .collect()
}

/// Bin width for a given shrink factor.
pub fn bin_width(shrink: f64) -> f64 {
    (2.0 * PI / 32.0 * (1.0 - shrink)).clamp(2.0 * PI / 128.0, 2.0 * PI / 16.0)
}

/// Shielding curve for the singularities `q` and the zeros `o` of M′ (points
/// with |ζ| ≥ 1 are ignored). The outermost point of each occupied angular bin
/// is a polygon vertex (empty bins are bridged by the interpolant); the
/// envelope is then pushed out toward the convex hull of all points and the
/// origin by the fraction 1 − `shrink`, the radial analogue of a boundary
/// polygon with that shrink factor. Points left outside the interpolant are
/// promoted to knots until γ encloses them all.
pub fn build_shield(q: &[Complex64], o: &[Complex64], shrink: f64) -> Result<ShieldingCurve> {
    if !(0.0..=1.0).contains(&shrink) {
        return Err(Error::InvalidInput(format!("shrink factor must lie in [0, 1], got {shrink}")));
    }
    let inside = |z: &&Complex64| z.is_finite() && z.norm() < INTERIOR_RADIUS;
    let zeros: Vec<Complex64> = o.iter().filter(inside).copied().collect();
    let pts: Vec<Complex64> = q.iter().filter(inside).chain(zeros.iter()).copied().collect();
    if pts.is_empty() {
        return Ok(ShieldingCurve::constant(DEFAULT_RHO));
    }
    let nbins = (2.0 * PI / bin_width(shrink)).ceil() as usize;
    let mut best: Vec<Option<Complex64>> = vec![None; nbins];
    for &z in &pts {
        let b = (((wrap_angle(z.arg()) + PI) / (2.0 * PI)) * nbins as f64) as usize % nbins;
        if best[b].is_none_or(|w| z.norm() > w.norm()) {
            best[b] = Some(z);
        }
    }
    let envelope = ShieldingCurve::from_knots(best.iter().flatten().map(|z| (z.arg(), z.norm())).collect());
    let hull = convex_hull_with_origin(&pts);
    let lift = |th: f64| {
        let e = envelope.radius(th);
        e.max((1.0 - shrink) * hull_radius(&hull, th) + shrink * e)
    };
    let mut knots: Vec<(f64, f64)> = envelope.knots.iter().map(|&(th, _)| (th, lift(th))).collect();
    knots.extend((0..nbins).map(|b| {
        let th = -PI + (b as f64 + 0.5) * 2.0 * PI / nbins as f64;
        (th, lift(th))
    }));
    let mut shield = ShieldingCurve::from_knots(knots.clone());
    for _ in 0..=pts.len() {
        let outside: Vec<(f64, f64)> = pts
            .iter()
            .filter(|z| z.norm() > shield.radius(z.arg()))
            .map(|z| (z.arg(), z.norm()))
            .collect();
        if outside.is_empty() {
            break;
        }
        knots.extend(outside);
        shield = ShieldingCurve::from_knots(knots.clone());
    }
    Ok(shield)
}

/// Counterclockwise convex hull (monotone chain) of `pts` ∪ {0}.
fn convex_hull_with_origin(pts: &[Complex64]) -> Vec<Complex64> {
    let mut p: Vec<Complex64> = pts.to_vec();
    p.push(Complex64::new(0.0, 0.0));
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &z in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], z) <= 0.0 {
                hull.pop();
            }
            hull.push(z);
        }
        hull.pop();
    }
    hull
}

/// Distance from the origin to the hull boundary along direction θ.
fn hull_radius(hull: &[Complex64], theta: f64) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let u = Complex64::from_polar(1.0, theta);
    let mut r = f64::INFINITY;
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        let e = b - a;
        let n = Complex64::new(e.im, -e.re); // outward for counterclockwise order
        let nu = n.re * u.re + n.im * u.im;
        if nu > 0.0 {
            r = r.min((n.re * a.re + n.im * a.im).max(0.0) / nu);
        }
    }
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

/// ρ(θ) of a shielding curve.
pub fn shield_radius(gamma: &ShieldingCurve, theta: f64) -> f64 {
    gamma.radius(theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_symmetric_shields() {
        assert_eq!(shield_radius(&ShieldingCurve::constant(0.5), 1.234), 0.5);
        let pts = [0.5, Complex64::new(0.0, 0.5).re, -0.5, 0.0];
        let pts = vec![
            Complex64::new(pts[0], 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(pts[2], 0.0),
            Complex64::new(0.0, -0.5),
        ];
        let g = build_shield(&pts, &[], 0.3).unwrap();
        for i in 0..400 {
            let th = -PI + 2.0 * PI * i as f64 / 400.0;
            assert!((g.radius(th) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn knots_interpolated_without_overshoot() {
        let g = ShieldingCurve::from_knots(vec![(0.0, 0.4), (PI / 2.0, 0.6), (PI, 0.3), (-PI / 2.0, 0.5)]);
        assert_eq!(g.radius(PI / 2.0), 0.6);
        assert_eq!(g.radius(0.0), 0.4);
        let mid = g.radius(PI / 4.0);
        assert!((0.4..=0.6).contains(&mid));
        for i in 0..1000 {
            let r = g.radius(-PI + 2.0 * PI * i as f64 / 1000.0);
            assert!((0.3..=0.6).contains(&r));
        }
        assert!((g.radius(-PI) - g.radius(PI)).abs() < 1e-15);
    }

    #[test]
    fn single_point_never_exceeded() {
        let g = build_shield(&[Complex64::new(0.7, 0.0)], &[], 0.2).unwrap();
        assert!((g.radius(0.0) - 0.7).abs() < 1e-15);
        for i in 0..100 {
            assert!(g.radius(-PI + 2.0 * PI * i as f64 / 100.0) <= 0.7);
        }
    }

    #[test]
    fn empty_input_gives_default_ring() {
        let g = build_shield(&[], &[], 0.2).unwrap();
        assert_eq!(g.radius(0.3), DEFAULT_RHO);
        assert!(build_shield(&[], &[], 1.5).is_err());
    }

    #[test]
    fn hull_radius_of_square() {
        let pts = [Complex64::new(0.5, 0.5), Complex64::new(-0.5, 0.5), Complex64::new(-0.5, -0.5), Complex64::new(0.5, -0.5)];
        let hull = convex_hull_with_origin(&pts);
        assert_eq!(hull.len(), 4);
        assert!((hull_radius(&hull, 0.0) - 0.5).abs() < 1e-15);
        assert!((hull_radius(&hull, PI / 4.0) - 0.5 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bin_width_is_clipped() {
        assert!((bin_width(0.0) - 2.0 * PI / 32.0).abs() < 1e-15);
        assert!((bin_width(1.0) - 2.0 * PI / 128.0).abs() < 1e-15);
    }
}
