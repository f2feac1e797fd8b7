//! Rational functions in barycentric form
//!
//! ```text
//!          sum_j w_j f_j / (z - s_j)
//! r(z) = -----------------------------
//!            sum_j w_j / (z - s_j)
//! ```
//!
//! with support points `s_j`, values `f_j` and weights `w_j`. Every support
//! point with a nonzero weight is a removable singularity where `r(s_j) = f_j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative distance below which `z` is treated as sitting on a support point.
pub const SUPPORT_HIT: f64 = 1e-15;
/// Default residue threshold for discarding spurious (Froissart) poles.
pub const SPURIOUS_RESIDUE: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Record")]
pub struct BarycentricRational {
    support: Vec<Complex64>,
    values: Vec<Complex64>,
    weights: Vec<Complex64>,
}

/// Unvalidated JSON record `{support[], values[], weights[]}`.
#[derive(Deserialize)]
struct Record {
    support: Vec<Complex64>,
    values: Vec<Complex64>,
    weights: Vec<Complex64>,
}

impl TryFrom<Record> for BarycentricRational {
    type Error = Error;
    fn try_from(r: Record) -> Result<Self> {
        Self::new(r.support, r.values, r.weights)
    }
}

/// Poles, their residues, and zeros of a rational function.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub poles: Vec<Complex64>,
    pub residues: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
}

impl PoleSet {
    /// Poles whose residue exceeds `tol * scale` in magnitude, with their residues.
    pub fn significant(&self, tol: f64, scale: f64) -> PoleSet {
        let (poles, residues) = self
            .poles
            .iter()
            .zip(&self.residues)
            .filter(|(_, r)| r.norm() >= tol * scale)
            .map(|(p, r)| (*p, *r))
            .unzip();
        PoleSet { poles, residues, zeros: self.zeros.clone() }
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

impl BarycentricRational {
    pub fn new(support: Vec<Complex64>, values: Vec<Complex64>, weights: Vec<Complex64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidInput("barycentric form needs at least one support point".into()));
        }
        if support.len() != values.len() || support.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "length mismatch: {} support points, {} values, {} weights",
                support.len(),
                values.len(),
                weights.len()
            )));
        }
        if weights.iter().all(|w| *w == ZERO) {
            return Err(Error::DegeneratePencil);
        }
        for (i, a) in support.iter().enumerate() {
            if support[..i].contains(a) {
                return Err(Error::InvalidInput(format!("duplicate support point {a}")));
            }
        }
        Ok(Self { support, values, weights })
    }

    pub fn support(&self) -> &[Complex64] {
        &self.support
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Degree `J` of the rational function (support count minus one).
    pub fn degree(&self) -> usize {
        self.support.len() - 1
    }

    fn scale(&self) -> f64 {
        self.support.iter().fold(0.0f64, |m, s| m.max(s.norm()))
    }

    fn support_hit(&self, z: Complex64) -> Option<usize> {
        let tol = SUPPORT_HIT * self.scale();
        self.support
            .iter()
            .zip(&self.weights)
            .position(|(s, w)| *w != ZERO && (*s == z || (z - s).norm() < tol))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        if let Some(k) = self.support_hit(z) {
            return self.values[k];
        }
        if self.support.len() == 1 {
            return self.values[0];
        }
        let (mut num, mut den) = (ZERO, ZERO);
        for ((s, f), w) in self.support.iter().zip(&self.values).zip(&self.weights) {
            if *w == ZERO {
                continue;
            }
            let c = w / (z - s);
            num += c * f;
            den += c;
        }
        num / den
    }

    pub fn eval_many(&self, zs: &[Complex64]) -> Vec<Complex64> {
        zs.iter().map(|&z| self.eval(z)).collect()
    }

    /// First or second derivative at `z`.
    pub fn derivative(&self, z: Complex64, order: u8) -> Result<Complex64> {
        if !(1..=2).contains(&order) {
            return Err(Error::InvalidInput(format!("derivative order must be 1 or 2, got {order}")));
        }
        if self.degree() == 0 {
            return Ok(ZERO);
        }
        match self.support_hit(z) {
            Some(k) => Ok(self.derivative_at_support(k, order)),
            None => Ok(self.derivative_regular(z, order)),
        }
    }

    /// Differentiation of the identity `sum_j w_j (f_j - r(z)) / (z - s_j) = 0`.
    fn derivative_regular(&self, z: Complex64, order: u8) -> Complex64 {
        let r = self.eval(z);
        let mut den = ZERO;
        let mut d1 = ZERO;
        for ((s, f), w) in self.support.iter().zip(&self.values).zip(&self.weights) {
            if *w == ZERO {
                continue;
            }
            let inv = 1.0 / (z - s);
            den += w * inv;
            d1 += w * (r - f) * inv * inv;
        }
        let r1 = d1 / den;
        if order == 1 {
            return r1;
        }
        let mut d2 = ZERO;
        for ((s, f), w) in self.support.iter().zip(&self.values).zip(&self.weights) {
            if *w == ZERO {
                continue;
            }
            let inv = 1.0 / (z - s);
            d2 += w * inv * inv * (r1 + (f - r) * inv);
        }
        2.0 * d2 / den
    }

    /// Schneider-Werner formulas at the support point `s_k`.
    fn derivative_at_support(&self, k: usize, order: u8) -> Complex64 {
        let (sk, fk, wk) = (self.support[k], self.values[k], self.weights[k]);
        let mut acc = ZERO;
        let mut dd = Vec::with_capacity(self.support.len());
        for (j, ((s, f), w)) in self.support.iter().zip(&self.values).zip(&self.weights).enumerate() {
            if j == k || *w == ZERO {
                continue;
            }
            let div = (fk - f) / (sk - s);
            acc += w * div;
            dd.push((*s, *w, div));
        }
        let r1 = -acc / wk;
        if order == 1 {
            return r1;
        }
        let acc2: Complex64 = dd.iter().map(|(s, w, div)| w * (r1 - div) / (sk - s)).sum();
        -2.0 * acc2 / wk
    }

    /// Poles, residues and zeros from the arrowhead generalized eigenvalue
    /// problems
    ///
    /// ```text
    /// | 0  w^T |       | 0  0 |          | 0  (w f)^T |
    /// | 1  S   |  - l  | 0  I |,         | 1  S       |  - l B
    /// ```
    ///
    /// with `S = diag(s_j)`. The two spurious infinite eigenvalues are dropped.
    pub fn poles_zeros_residues(&self) -> Result<PoleSet> {
        let poles = self.roots_of(&self.weights)?;
        let fw: Vec<Complex64> = self.weights.iter().zip(&self.values).map(|(w, f)| w * f).collect();
        let zeros = if fw.iter().all(|v| *v == ZERO) {
            Vec::new()
        } else {
            self.roots_of(&fw)?
        };
        let residues = poles.iter().map(|&p| self.residue(p)).collect();
        Ok(PoleSet { poles, residues, zeros })
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        self.roots_of(&self.weights)
    }

    fn roots_of(&self, top: &[Complex64]) -> Result<Vec<Complex64>> {
        if top.iter().all(|w| *w == ZERO) {
            return Err(Error::DegeneratePencil);
        }
        let active: Vec<usize> = (0..self.support.len()).filter(|&j| self.weights[j] != ZERO).collect();
        let n = active.len();
        if n < 2 {
            return Ok(Vec::new());
        }
        let x: Vec<Complex64> = active.iter().map(|&j| self.support[j]).collect();
        let a: Vec<Complex64> = active.iter().map(|&j| top[j]).collect();
        let scale = self.scale().max(1.0);
        let tol = SUPPORT_HIT * 10.0 * scale;
        let roots = linalg::barycentric_roots(&x, &a, 1e13 * scale)?;
        Ok(roots
            .into_iter()
            .filter(|p| active.iter().all(|&j| (p - self.support[j]).norm() > tol))
            .collect())
    }

    /// Residue `N(p) / D'(p)` at a simple pole `p`.
    pub fn residue(&self, p: Complex64) -> Complex64 {
        let (mut num, mut dden) = (ZERO, ZERO);
        for ((s, f), w) in self.support.iter().zip(&self.values).zip(&self.weights) {
            if *w == ZERO {
                continue;
            }
            let inv = 1.0 / (p - s);
            num += w * f * inv;
            dden -= w * inv * inv;
        }
        num / dden
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Interpolant of `f(z) = z` on three points with weights from the
    /// Lagrange (polynomial) barycentric formula.
    fn identity_on_three() -> BarycentricRational {
        let s = vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)];
        let w: Vec<Complex64> = (0..3)
            .map(|j| {
                let p: Complex64 = (0..3).filter(|&k| k != j).map(|k| s[j] - s[k]).product();
                1.0 / p
            })
            .collect();
        BarycentricRational::new(s.clone(), s, w).unwrap()
    }

    #[test]
    fn reproduces_linear_data() {
        let r = identity_on_three();
        assert!((r.eval(c(0.5, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(r.eval(c(1.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn interpolates_exactly_at_support() {
        let r = identity_on_three();
        for (s, f) in r.support().iter().zip(r.values()) {
            assert_eq!(r.eval(*s), *f);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(BarycentricRational::new(vec![], vec![], vec![]).is_err());
        assert!(BarycentricRational::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], vec![ZERO]).is_err());
        assert!(BarycentricRational::new(vec![c(0.0, 0.0); 2], vec![c(1.0, 0.0); 2], vec![c(1.0, 0.0); 2]).is_err());
        assert!(BarycentricRational::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0); 2], vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn derivatives_of_square() {
        // z^2 interpolated by a polynomial barycentric form on four points.
        let s = vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.2, -0.7)];
        let w: Vec<Complex64> = (0..4)
            .map(|j| 1.0 / (0..4).filter(|&k| k != j).map(|k| s[j] - s[k]).product::<Complex64>())
            .collect();
        let f: Vec<Complex64> = s.iter().map(|z| z * z).collect();
        let r = BarycentricRational::new(s.clone(), f, w).unwrap();
        let z = c(0.3, 0.1);
        assert!((r.derivative(z, 1).unwrap() - 2.0 * z).norm() < 1e-12);
        assert!((r.derivative(z, 2).unwrap() - c(2.0, 0.0)).norm() < 1e-10);
        assert!((r.derivative(s[0], 2).unwrap() - c(2.0, 0.0)).norm() < 1e-10);
        assert!((r.derivative(s[2], 1).unwrap() - 2.0 * s[2]).norm() < 1e-12);
        assert!(r.derivative(z, 3).is_err());
    }

    #[test]
    fn pole_and_zero_of_simple_rational() {
        // (z - 3)/(z - 2) through support {0, 1}.
        let s = vec![c(0.0, 0.0), c(1.0, 0.0)];
        let f: Vec<Complex64> = s.iter().map(|z| (z - 3.0) / (z - 2.0)).collect();
        // Denominator (z-2) = w0 (z-1) + w1 z  =>  w0 = 2, w1 = -1.
        let w = vec![c(2.0, 0.0), c(-1.0, 0.0)];
        let r = BarycentricRational::new(s, f, w).unwrap();
        let ps = r.poles_zeros_residues().unwrap();
        assert_eq!(ps.poles.len(), 1);
        assert!((ps.poles[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((ps.zeros[0] - c(3.0, 0.0)).norm() < 1e-12);
        // residue of (z-3)/(z-2) at 2 is -1
        assert!((ps.residues[0] - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn json_record_round_trip() {
        let r = identity_on_three();
        let s = r.to_json().unwrap();
        assert!(s.contains("\"support\":[[1.0,0.0]"));
        assert_eq!(BarycentricRational::from_json(&s).unwrap(), r);
        let bad = r#"{"support":[[0,0],[0,0]],"values":[[1,0],[1,0]],"weights":[[1,0],[1,0]]}"#;
        assert!(BarycentricRational::from_json(bad).is_err());
    }
}
