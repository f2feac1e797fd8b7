//! Multipole MFS: u_s(z) ≈ Σ_j Σ_{|r|≤R} c_{j,r} H_{|r|}(k|z−p_j|) ((z−p_j)/|z−p_j|)^r.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{ConformalMap, ShieldingCurve};
use crate::curve::ParametricCurve;
use crate::error::{Error, Result};
use crate::linalg::{lstsq_complex, Lstsq};
use crate::specfun::{hankel1, hankel1_upward};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub const DEFAULT_ORDER: u32 = 2;
pub const REFINE_CHECK: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IncidentKind {
    /// exp(ik(x cos θ + y sin θ))
    PlaneWave { angle: f64 },
    /// Σ a_m H_0(k|z − q_m|), with every q_m outside Γ.
    PointSources { locations: Vec<Complex64>, amplitudes: Vec<Complex64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidentField {
    pub kind: IncidentKind,
    pub k: f64,
}

impl IncidentField {
    pub fn plane_wave(k: f64, angle: f64) -> Result<Self> {
        Self::checked(IncidentKind::PlaneWave { angle }, k)
    }

    pub fn point_sources(k: f64, locations: Vec<Complex64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if locations.is_empty() || locations.len() != amplitudes.len() {
            return Err(Error::InvalidInput("point sources need matching, nonempty locations and amplitudes".into()));
        }
        Self::checked(IncidentKind::PointSources { locations, amplitudes }, k)
    }

    fn checked(kind: IncidentKind, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self { kind, k })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            IncidentKind::PlaneWave { angle } => {
                let phase = self.k * (z.re * angle.cos() + z.im * angle.sin());
                Complex64::from_polar(1.0, phase)
            }
            IncidentKind::PointSources { locations, amplitudes } => locations
                .iter()
                .zip(amplitudes)
                .map(|(q, a)| a * hankel1(0, self.k * (z - q).norm()).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
                .sum(),
        }
    }

    /// Fails unless every point source lies strictly outside `curve`.
    pub fn check_exterior(&self, curve: &ParametricCurve) -> Result<()> {
        if let IncidentKind::PointSources { locations, .. } = &self.kind {
            if let Some(q) = locations.iter().find(|q| curve.contains(**q)) {
                return Err(Error::InvalidInput(format!("incident point source {q} lies inside the scatterer")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfsSolution {
    pub sources: Vec<Complex64>,
    /// Coefficient of source j, order r at index (r + R)·J + j.
    pub coeffs: Vec<Complex64>,
    pub order: u32,
    pub k: f64,
    pub scale_factors: Vec<f64>,
    /// Numerical rank of the least-squares system.
    pub rank: usize,
}

/// Design matrix with its per-column scale factors.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub matrix: Mat<Complex64>,
    pub scale_factors: Vec<f64>,
}

fn column(j: usize, r: i64, order: u32, nsrc: usize) -> usize {
    (r + order as i64) as usize * nsrc + j
}

/// Multipole terms of one source at one point: `out[r + R]` for r ∈ [−R, R].
fn multipoles(p: Complex64, z: Complex64, k: f64, order: u32, h: &mut [Complex64], out: &mut [Complex64]) -> bool {
    let d = z - p;
    let dist = d.norm();
    if !(dist > 0.0) {
        return false;
    }
    hankel1_upward(k * dist, h);
    let e = d / dist;
    let r0 = order as usize;
    out[r0] = h[0];
    let (mut up, mut down) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    for r in 1..=r0 {
        up *= e;
        down *= e.conj();
        out[r0 + r] = h[r] * up;
        out[r0 - r] = h[r] * down;
    }
    out.iter().all(|v| v.is_finite())
}

/// Assembles the N × J(2R+1) matrix, each column scaled to unit max modulus
/// on the samples.
pub fn assemble(sources: &[Complex64], samples: &[Complex64], k: f64, order: u32) -> Result<Assembly> {
    let (n, nsrc) = (samples.len(), sources.len());
    let width = 2 * order as usize + 1;
    let ncols = nsrc * width;
    if n < ncols {
        return Err(Error::InvalidInput(format!("{n} samples cannot determine {ncols} unknowns")));
    }
    // per source: n × width block, column-major by r
    let block = |j: usize| -> Result<Vec<Complex64>> {
        let mut h = vec![Complex64::new(0.0, 0.0); order as usize + 1];
        let mut row = vec![Complex64::new(0.0, 0.0); width];
        let mut out = vec![Complex64::new(0.0, 0.0); n * width];
        for (i, &z) in samples.iter().enumerate() {
            if !multipoles(sources[j], z, k, order, &mut h, &mut row) {
                return Err(Error::NonFiniteEntry { source_index: j, sample_index: i });
            }
            for (r, v) in row.iter().enumerate() {
                out[r * n + i] = *v;
            }
        }
        Ok(out)
    };
    #[cfg(feature = "parallel")]
    let blocks: Vec<Vec<Complex64>> = (0..nsrc).into_par_iter().map(block).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let blocks: Vec<Vec<Complex64>> = (0..nsrc).map(block).collect::<Result<_>>()?;

    let mut matrix = Mat::<Complex64>::zeros(n, ncols);
    let mut scale_factors = vec![1.0; ncols];
    for (j, b) in blocks.iter().enumerate() {
        for ri in 0..width {
            let c = column(j, ri as i64 - order as i64, order, nsrc);
            let col = &b[ri * n..(ri + 1) * n];
            let s = col.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let s = if s > 0.0 { s } else { 1.0 };
            scale_factors[c] = s;
            for (i, v) in col.iter().enumerate() {
                matrix[(i, c)] = v / s;
            }
        }
    }
    Ok(Assembly { matrix, scale_factors })
}

/// Rank-revealing least-squares solve; warns on severe rank deficiency.
pub fn solve_ls(assembly: &Assembly, rhs: &[Complex64]) -> Result<Lstsq<Complex64>> {
    let sol = lstsq_complex(assembly.matrix.as_ref(), rhs)?;
    if sol.severely_deficient() {
        log::warn!("least-squares system has numerical rank {} of {} columns", sol.rank, sol.cols);
    }
    Ok(sol)
}

impl MfsSolution {
    pub fn from_assembly(sources: Vec<Complex64>, order: u32, k: f64, assembly: Assembly, sol: Lstsq<Complex64>) -> Self {
        Self { sources, coeffs: sol.x, order, k, scale_factors: assembly.scale_factors, rank: sol.rank }
    }

    pub fn unknowns(&self) -> usize {
        self.coeffs.len()
    }

    /// Expansion value at one point (u_s in the convention u_s = u_inc on Γ).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let width = 2 * self.order as usize + 1;
        let nsrc = self.sources.len();
        let mut h = vec![Complex64::new(0.0, 0.0); self.order as usize + 1];
        let mut row = vec![Complex64::new(0.0, 0.0); width];
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &p) in self.sources.iter().enumerate() {
            if !multipoles(p, z, self.k, self.order, &mut h, &mut row) {
                return Complex64::new(f64::NAN, f64::NAN);
            }
            for (ri, v) in row.iter().enumerate() {
                let c = column(j, ri as i64 - self.order as i64, self.order, nsrc);
                acc += self.coeffs[c] * v / self.scale_factors[c];
            }
        }
        acc
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Scattered field u_s at `points`, or the total field u_s − u_inc when
/// `total` is set.
pub fn eval_field(sol: &MfsSolution, points: &[Complex64], incident: Option<&IncidentField>) -> Vec<Complex64> {
    let one = |z: &Complex64| {
        let us = sol.eval(*z);
        match incident {
            Some(inc) => us - inc.eval(*z),
            None => us,
        }
    };
    #[cfg(feature = "parallel")]
    return points.par_iter().map(one).collect();
    #[cfg(not(feature = "parallel"))]
    points.iter().map(one).collect()
}

/// Sources p_j = M(√ρ(θ_j) e^{iθ_j}); each must land inside Γ.
pub fn place_sources(
    map: &ConformalMap,
    gamma: &ShieldingCurve,
    support_angles: &[f64],
    curve: &ParametricCurve,
) -> Result<Vec<Complex64>> {
    support_angles
        .iter()
        .enumerate()
        .map(|(j, &th)| {
            let p = map.eval(Complex64::from_polar(gamma.radius(th).sqrt(), th));
            if !p.is_finite() || !curve.contains(p) {
                return Err(Error::Placement(format!("source {j} (θ = {th:.6}) maps to {p}, outside Γ")));
            }
            Ok(p)
        })
        .collect()
}

/// Collocation parameters: `per_gap` equispaced parameters in every gap
/// between cyclically consecutive support parameters, support points included.
pub fn gap_samples(support_params: &[f64], per_gap: usize) -> Vec<f64> {
    let mut s: Vec<f64> = support_params.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    if s.is_empty() {
        return vec![];
    }
    let n = s.len();
    let mut out = Vec::with_capacity(n * per_gap);
    for i in 0..n {
        let a = s[i];
        let b = if i + 1 < n { s[i + 1] } else { s[0] + 2.0 };
        for q in 0..per_gap {
            let t = a + (b - a) * q as f64 / per_gap as f64;
            out.push(if t >= 1.0 { t - 2.0 } else { t });
        }
    }
    out
}

/// Parameters `refine`× finer than `params` (sorted cyclically).
pub fn refine_params(params: &[f64], refine: usize) -> Vec<f64> {
    gap_samples(params, refine)
}

/// max |u_s − u_inc| on a grid `refine`× finer than the collocation parameters.
pub fn boundary_residual(
    sol: &MfsSolution,
    g: &ParametricCurve,
    incident: &IncidentField,
    collocation: &[f64],
    refine: usize,
) -> f64 {
    let pts: Vec<Complex64> = refine_params(collocation, refine).into_iter().map(|t| g.point(t)).collect();
    eval_field(sol, &pts, Some(incident)).into_iter().fold(0.0f64, |m, v| if v.is_finite() { m.max(v.norm()) } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column_normalizes() {
        let samples: Vec<Complex64> = (0..8).map(|i| Complex64::from_polar(1.0, i as f64)).collect();
        let a = assemble(&[Complex64::new(0.0, 0.0)], &samples, 1.0, 0).unwrap();
        let h = hankel1(0, 1.0).unwrap();
        assert!((a.scale_factors[0] - h.norm()).abs() < 1e-15);
        for i in 0..8 {
            assert!((a.matrix[(i, 0)] - h / h.norm()).norm() < 1e-15);
        }
    }

    #[test]
    fn source_on_sample_is_reported() {
        let samples = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let err = assemble(&[Complex64::new(0.0, 1.0)], &samples, 1.0, 0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { source_index: 0, sample_index: 1 }));
    }

    #[test]
    fn gap_sampling_counts() {
        let t = gap_samples(&[-1.0, -0.5, 0.0, 0.5], 3);
        assert_eq!(t.len(), 12);
        assert!(t.iter().all(|t| (-1.0..1.0).contains(t)));
        assert!((t[1] - (-1.0 + 0.5 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn plane_wave_formula() {
        let u = IncidentField::plane_wave(2.0, 0.3).unwrap();
        let z = Complex64::new(0.4, -1.1);
        let want = Complex64::from_polar(1.0, 2.0 * (0.4 * 0.3f64.cos() - 1.1 * 0.3f64.sin()));
        assert!((u.eval(z) - want).norm() < 1e-15);
        assert!(IncidentField::plane_wave(0.0, 0.0).is_err());
    }
}
