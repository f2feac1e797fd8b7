//! Discrete AAA on a fixed sample set.

use faer::Mat;
use log::debug;
use num_complex::Complex64;

use crate::barycentric::{BarycentricRational, PoleSet, SPURIOUS_RESIDUE};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Debug)]
pub struct AaaResult {
    pub approx: BarycentricRational,
    /// Max-norm error over the provided samples.
    pub max_error: f64,
    pub poles: PoleSet,
    pub iterations: usize,
    /// False when `mmax` was reached before the tolerance.
    pub converged: bool,
}

/// Weights for fixed support `idx` from the Loewner matrix on the remaining rows.
pub(crate) fn loewner_weights(
    z: &[Complex64],
    f: &[Complex64],
    idx: &[usize],
    rows: &[usize],
) -> Result<Vec<Complex64>> {
    let a = Mat::from_fn(rows.len(), idx.len(), |i, j| {
        let (r, s) = (rows[i], idx[j]);
        (f[r] - f[s]) / (z[r] - z[s])
    });
    linalg::null_vector(a.as_ref())
}

fn check_inputs(f: &[Complex64], z: &[Complex64]) -> Result<()> {
    if z.len() != f.len() {
        return Err(Error::InvalidInput(format!("{} samples but {} values", z.len(), f.len())));
    }
    if z.len() < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    if f.iter().chain(z).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample or value".into()));
    }
    Ok(())
}

/// Greedy AAA: fit `f` at `z` to relative max-norm tolerance `tol`, degree at most `mmax`.
pub fn aaa_fit(f: &[Complex64], z: &[Complex64], tol: f64, mmax: usize) -> Result<AaaResult> {
    check_inputs(f, z)?;
    let n = z.len();
    let norm = f.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let mean: Complex64 = f.iter().sum::<Complex64>() / n as f64;
    let mut residual: Vec<f64> = f.iter().map(|v| (v - mean).norm()).collect();
    let mut in_support = vec![false; n];
    let mut idx = Vec::new();
    let mut weights;
    let mut max_error;
    let mut iterations = 0;

    loop {
        // Lowest index wins ties.
        let mut next = 0;
        let mut best = -1.0;
        for (i, &e) in residual.iter().enumerate() {
            if !in_support[i] && e > best {
                best = e;
                next = i;
            }
        }
        idx.push(next);
        in_support[next] = true;
        iterations += 1;

        let rows: Vec<usize> = (0..n).filter(|&i| !in_support[i]).collect();
        weights = loewner_weights(z, f, &idx, &rows)?;
        let r = rational(z, f, &idx, &weights)?;
        for (i, e) in residual.iter_mut().enumerate() {
            *e = if in_support[i] { 0.0 } else { (r.eval(z[i]) - f[i]).norm() };
        }
        max_error = residual.iter().fold(0.0f64, |m, &e| m.max(e));
        if max_error <= tol * norm || idx.len() > mmax || rows.is_empty() {
            break;
        }
    }
    let converged = max_error <= tol * norm;

    let mut approx = rational(z, f, &idx, &weights)?;
    if approx.degree() > 0 {
        approx = cleanup(z, f, idx, approx, norm)?;
        max_error = z
            .iter()
            .zip(f)
            .map(|(zi, fi)| (approx.eval(*zi) - fi).norm())
            .fold(0.0, f64::max);
    }
    let poles = if approx.degree() > 0 { approx.poles_zeros_residues()? } else { PoleSet::default() };
    debug!("aaa: degree {} error {:.3e} converged {}", approx.degree(), max_error, converged);
    Ok(AaaResult { approx, max_error, poles, iterations, converged })
}

fn rational(z: &[Complex64], f: &[Complex64], idx: &[usize], w: &[Complex64]) -> Result<BarycentricRational> {
    BarycentricRational::new(idx.iter().map(|&i| z[i]).collect(), idx.iter().map(|&i| f[i]).collect(), w.to_vec())
}

/// Removes Froissart doublets: for each pole with negligible residue, drop the
/// nearest support point and refit the weights on the full sample set.
fn cleanup(
    z: &[Complex64],
    f: &[Complex64],
    mut idx: Vec<usize>,
    approx: BarycentricRational,
    norm: f64,
) -> Result<BarycentricRational> {
    let ps = approx.poles_zeros_residues()?;
    let spurious: Vec<Complex64> = ps
        .poles
        .iter()
        .zip(&ps.residues)
        .filter(|(_, r)| r.norm() < SPURIOUS_RESIDUE * norm)
        .map(|(p, _)| *p)
        .collect();
    if spurious.is_empty() {
        return Ok(approx);
    }
    debug!("aaa: removing {} spurious poles", spurious.len());
    for p in spurious {
        if idx.len() <= 1 {
            break;
        }
        let (k, _) = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| (k, (z[i] - p).norm()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        idx.remove(k);
    }
    let rows: Vec<usize> = (0..z.len()).filter(|i| !idx.contains(i)).collect();
    let w = loewner_weights(z, f, &idx, &rows)?;
    rational(z, f, &idx, &w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> Vec<Complex64> {
        (0..n).map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64)).collect()
    }

    #[test]
    fn constant_is_degree_zero() {
        let z = circle(50);
        let f = vec![Complex64::new(7.0, 0.0); 50];
        let r = aaa_fit(&f, &z, 1e-13, 100).unwrap();
        assert_eq!(r.approx.degree(), 0);
        assert_eq!(r.max_error, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn exact_at_support_points() {
        let z = circle(200);
        let f: Vec<Complex64> = z.iter().map(|z| (3.0 * z).exp()).collect();
        let r = aaa_fit(&f, &z, 1e-13, 100).unwrap();
        for (s, v) in r.approx.support().iter().zip(r.approx.values()) {
            assert_eq!(r.approx.eval(*s), *v);
        }
        assert!(r.max_error <= 1e-13 * 3f64.exp(), "{}", r.max_error);
    }

    #[test]
    fn mmax_stops_without_failing() {
        let z = circle(200);
        let f: Vec<Complex64> = z.iter().map(|z| (z * 10.0).exp()).collect();
        let r = aaa_fit(&f, &z, 1e-15, 3).unwrap();
        assert!(!r.converged);
        assert!(r.approx.degree() <= 3);
    }

    #[test]
    fn rejects_bad_input() {
        let z = circle(4);
        assert!(aaa_fit(&[Complex64::new(1.0, 0.0)], &z[..1], 1e-3, 5).is_err());
        assert!(aaa_fit(&[Complex64::new(1.0, 0.0); 3], &z, 1e-3, 5).is_err());
    }
}
