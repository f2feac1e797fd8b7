//! Closed parametric curves Γ(t), t ∈ [−1, 1].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polyline resolution for the self-intersection check.
pub const JORDAN_POLYLINE: usize = 2048;
/// Polyline resolution for point-in-curve classification.
pub const WINDING_POLYLINE: usize = 8192;

type CurveFn = dyn Fn(f64) -> Complex64 + Send + Sync;

#[derive(Clone)]
pub struct ParametricCurve {
    gamma: Arc<CurveFn>,
    label: String,
    pub periodic: bool,
    pub analytic_hint: bool,
    outline: Arc<Vec<Complex64>>,
}

impl fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricCurve").field("label", &self.label).field("analytic_hint", &self.analytic_hint).finish()
    }
}

impl ParametricCurve {
    /// A closed curve from its parametrization. The orientation must be
    /// counterclockwise.
    pub fn new(label: impl Into<String>, analytic_hint: bool, gamma: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        let gamma: Arc<CurveFn> = Arc::new(gamma);
        let outline = Arc::new((0..WINDING_POLYLINE).map(|i| gamma(param(i, WINDING_POLYLINE))).collect());
        Self { gamma, label: label.into(), periodic: true, analytic_hint, outline }
    }

    pub fn circle(center: Complex64, radius: f64) -> Self {
        Self::new(format!("circle(c={center}, r={radius})"), true, move |t| center + Complex64::from_polar(radius, PI * t))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, t: f64) -> Complex64 {
        (self.gamma)(t)
    }

    /// `n` equispaced parameters on [−1, 1).
    pub fn params(n: usize) -> Vec<f64> {
        (0..n).map(|i| param(i, n)).collect()
    }

    pub fn sample(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|i| self.point(param(i, n))).collect()
    }

    /// Central-difference derivative dΓ/dt.
    pub fn derivative(&self, t: f64) -> Complex64 {
        let h = 1e-6;
        (self.point(t + h) - self.point(t - h)) / (2.0 * h)
    }

    pub fn scale(&self) -> f64 {
        self.outline.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn diameter(&self) -> f64 {
        let pts = self.sample(512);
        let mut d = 0.0f64;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Complex64 {
        let p = &self.outline;
        let (mut area, mut c) = (0.0, Complex64::new(0.0, 0.0));
        for i in 0..p.len() {
            let (a, b) = (p[i], p[(i + 1) % p.len()]);
            let cross = a.re * b.im - b.re * a.im;
            area += cross;
            c += (a + b) * cross;
        }
        c / (3.0 * area)
    }

    pub fn signed_area(&self) -> f64 {
        let p = &self.outline;
        (0..p.len())
            .map(|i| {
                let (a, b) = (p[i], p[(i + 1) % p.len()]);
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
            / 2.0
    }

    /// Winding number of the curve's polyline about `z`.
    pub fn winding_number(&self, z: Complex64) -> i32 {
        winding(&self.outline, z)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.winding_number(z) != 0
    }

    /// Smallest |Γ′| over `n` equispaced parameters.
    pub fn min_speed(&self, n: usize) -> f64 {
        Self::params(n).into_iter().map(|t| self.derivative(t).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Closedness, nondegeneracy, orientation and simplicity checks.
    pub fn validate(&self) -> Result<()> {
        let scale = self.scale();
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::CurveDegenerate(format!("{}: non-finite or zero curve", self.label)));
        }
        let gap = (self.point(-1.0) - self.point(1.0)).norm();
        if gap > 1e-12 * scale {
            return Err(Error::CurveDegenerate(format!("{}: not closed (gap {gap:.3e})", self.label)));
        }
        let speed = self.min_speed(JORDAN_POLYLINE);
        if speed < 1e-8 * scale {
            return Err(Error::CurveDegenerate(format!("{}: |Γ′| vanishes (min {speed:.3e})", self.label)));
        }
        if self.signed_area() <= 0.0 {
            return Err(Error::CurveDegenerate(format!("{}: clockwise orientation", self.label)));
        }
        if let Some((i, j)) = self_intersection(&self.sample(JORDAN_POLYLINE)) {
            return Err(Error::CurveDegenerate(format!("{}: polyline segments {i} and {j} intersect", self.label)));
        }
        Ok(())
    }

    /// Hex SHA-256 of 256 curve samples, used as a cache key.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for z in self.sample(256) {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn param(i: usize, n: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / n as f64
}

fn winding(p: &[Complex64], z: Complex64) -> i32 {
    let mut w = 0;
    for i in 0..p.len() {
        let (a, b) = (p[i], p[(i + 1) % p.len()]);
        let side = (b.re - a.re) * (z.im - a.im) - (z.re - a.re) * (b.im - a.im);
        if a.im <= z.im {
            if b.im > z.im && side > 0.0 {
                w += 1;
            }
        } else if b.im <= z.im && side < 0.0 {
            w -= 1;
        }
    }
    w
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if d1 == 0.0 && d2 == 0.0 && d3 == 0.0 && d4 == 0.0 {
        // collinear: overlap of the projections onto the dominant axis
        let key = |z: Complex64| if (b.re - a.re).abs() >= (b.im - a.im).abs() { z.re } else { z.im };
        let (lo1, hi1) = (key(a).min(key(b)), key(a).max(key(b)));
        let (lo2, hi2) = (key(c).min(key(d)), key(c).max(key(d)));
        return lo1 <= hi2 && lo2 <= hi1;
    }
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// First pair of non-adjacent intersecting segments of a closed polyline.
fn self_intersection(p: &[Complex64]) -> Option<(usize, usize)> {
    let n = p.len();
    let bbox = |i: usize| {
        let (a, b) = (p[i], p[(i + 1) % n]);
        (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im))
    };
    let boxes: Vec<_> = (0..n).map(bbox).collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (boxes[i], boxes[j]);
            if a.1 < b.0 || b.1 < a.0 || a.3 < b.2 || b.3 < a.2 {
                continue;
            }
            if segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}
