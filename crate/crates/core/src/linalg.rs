//! Thin wrappers around the dense factorizations used by the solvers.

use std::f64::consts::PI;

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Outcome of a rank-revealing least-squares solve.
#[derive(Clone, Debug)]
pub struct Lstsq<T> {
    pub x: Vec<T>,
    pub rank: usize,
    pub cols: usize,
}

impl<T> Lstsq<T> {
    /// More than half of the columns were dropped as numerically dependent.
    pub fn severely_deficient(&self) -> bool {
        2 * self.rank < self.cols
    }
}

/// Right singular vector belonging to the smallest singular value of `a`.
pub fn null_vector(a: MatRef<'_, Complex64>) -> Result<Vec<Complex64>> {
    let (m, n) = (a.nrows(), a.ncols());
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    if m < n {
        let padded = Mat::from_fn(n, n, |i, j| if i < m { a[(i, j)] } else { Complex64::new(0.0, 0.0) });
        return smallest_right_singular_vector(padded.as_ref());
    }
    // The SVD only sees the n x n triangular factor, which is then reused to
    // polish the vector by inverse iteration on R^H R.
    let r = householder_r(a);
    let mut v = smallest_right_singular_vector(r.as_ref())?;
    for _ in 0..2 {
        match inverse_iteration_step(r.as_ref(), &v) {
            Some(next) => v = next,
            None => break,
        }
    }
    Ok(v)
}

const QR_BLOCK: usize = 32;

/// Triangular factor of a blocked Householder QR of a tall matrix.
///
/// Unlike the library QR, no column is deflated however small its remaining
/// norm, which keeps singular values far below `m * eps * ||A||` meaningful.
pub fn householder_r(a: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let (m, n) = (a.nrows(), a.ncols());
    assert!(m >= n, "householder_r needs a tall matrix");
    let mut a = a.to_owned();
    let zero = Complex64::new(0.0, 0.0);
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + QR_BLOCK).min(n);
        let nb = k1 - k0;
        let mut taus = Vec::with_capacity(nb);
        for j in k0..k1 {
            let tau = reflect_column(&mut a, j);
            taus.push(tau);
            if tau != zero {
                for c in j + 1..k1 {
                    apply_reflector(&mut a, j, c, tau.conj());
                }
            }
        }
        if k1 < n {
            // Compact WY: H_1 ... H_nb = I - V T V^H.
            let rows = m - k0;
            let v = Mat::from_fn(rows, nb, |i, j| {
                let gi = k0 + i;
                let gj = k0 + j;
                if gi < gj {
                    zero
                } else if gi == gj {
                    Complex64::new(1.0, 0.0)
                } else {
                    a[(gi, gj)]
                }
            });
            let mut t = Mat::<Complex64>::zeros(nb, nb);
            for i in 0..nb {
                t[(i, i)] = taus[i];
                if i > 0 {
                    let w: Vec<Complex64> = (0..i)
                        .map(|p| (0..rows).map(|q| v[(q, p)].conj() * v[(q, i)]).sum::<Complex64>())
                        .collect();
                    for r in 0..i {
                        let s: Complex64 = (r..i).map(|p| t[(r, p)] * w[p]).sum();
                        t[(r, i)] = -taus[i] * s;
                    }
                }
            }
            let trailing = a.as_mut().submatrix_mut(k0, k1, rows, n - k1);
            let w = v.adjoint() * trailing.as_ref();
            let w = t.adjoint() * &w;
            faer::linalg::matmul::matmul(trailing, faer::Accum::Add, &v, &w, Complex64::new(-1.0, 0.0), faer::Par::Seq);
        }
        k0 = k1;
    }
    Mat::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { zero })
}

/// Householder reflector annihilating `a[j+1.., j]`, stored below the
/// diagonal with implicit unit head. Returns `tau` with `H = I - tau v v^H`.
fn reflect_column(a: &mut Mat<Complex64>, j: usize) -> Complex64 {
    let m = a.nrows();
    let alpha = a[(j, j)];
    let xnorm = (j + 1..m).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt();
    if xnorm == 0.0 && alpha.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let beta = -alpha.re.signum() * alpha.norm().hypot(xnorm);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for i in j + 1..m {
        a[(i, j)] *= scale;
    }
    a[(j, j)] = Complex64::new(beta, 0.0);
    tau
}

/// `a[j.., c] <- (I - tau v v^H) a[j.., c]` for the reflector stored in column `j`.
fn apply_reflector(a: &mut Mat<Complex64>, j: usize, c: usize, tau: Complex64) {
    let m = a.nrows();
    let mut dot = a[(j, c)];
    for i in j + 1..m {
        dot += a[(i, j)].conj() * a[(i, c)];
    }
    let k = tau * dot;
    a[(j, c)] -= k;
    for i in j + 1..m {
        let vi = a[(i, j)];
        a[(i, c)] -= k * vi;
    }
}

fn smallest_right_singular_vector(a: MatRef<'_, Complex64>) -> Result<Vec<Complex64>> {
    let n = a.ncols();
    let svd = a.thin_svd().map_err(|e| Error::LinearAlgebra(format!("svd: {e:?}")))?;
    let v = svd.V();
    Ok((0..n).map(|i| v[(i, n - 1)]).collect())
}

/// One step `v <- (R^H R)^{-1} v / ||.||` with triangular solves.
fn inverse_iteration_step(r: MatRef<'_, Complex64>, v: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = v.len();
    // R^H y = v (lower triangular)
    let mut y = v.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= r[(k, i)].conj() * y[k];
        }
        y[i] = s / r[(i, i)].conj();
    }
    // R x = y (upper triangular)
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= r[(i, k)] * y[k];
        }
        y[i] = s / r[(i, i)];
    }
    let norm = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return None;
    }
    Some(y.into_iter().map(|c| c / norm).collect())
}

/// Roots of `Σ_j a_j / (z − x_j)`, i.e. the finite eigenvalues of the
/// arrowhead pencil `[[0, aᵀ], [1, diag(x)]] − z·diag(0, I)`.
///
/// The pencil is reduced exactly to a standard eigenproblem of order n − 1:
/// the Möbius change ζ = 1/(z − β) keeps the same arrowhead form with nodes
/// σ_j = 1/(x_j − β) and weights a_j σ_j, and a Householder reflection onto
/// the orthogonal complement of those weights deflates the constraint row.
/// The shift β is picked off the nodes where |Σ a_j σ_j| is largest, so the
/// division it implies is well conditioned; roots at z = ∞ come out as ζ ≈ 0.
/// Roots farther than `infinite_beyond` from the node centroid are dropped.
pub fn barycentric_roots(x: &[Complex64], a: &[Complex64], infinite_beyond: f64) -> Result<Vec<Complex64>> {
    let n = x.len();
    if n != a.len() {
        return Err(Error::InvalidInput("node and weight counts differ".into()));
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    let center = x.iter().sum::<Complex64>() / n as f64;
    let radius = x.iter().fold(0.0f64, |m, v| m.max((v - center).norm())).max(f64::MIN_POSITIVE);
    let shifted = |beta: Complex64| -> (Vec<Complex64>, Vec<Complex64>, f64) {
        let sigma: Vec<Complex64> = x.iter().map(|v| 1.0 / (v - beta)).collect();
        let b: Vec<Complex64> = a.iter().zip(&sigma).map(|(a, s)| a * s).collect();
        let bn = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let c = if bn > 0.0 { b.iter().sum::<Complex64>().norm() / bn } else { 0.0 };
        (sigma, b, c)
    };
    let (beta, (sigma, b, _)) = (0..8)
        .map(|m| center + Complex64::from_polar(2.0 * radius, 0.3 + m as f64 * PI / 4.0))
        .map(|beta| (beta, shifted(beta)))
        .max_by(|p, q| p.1 .2.total_cmp(&q.1 .2))
        .expect("eight candidate shifts");
    let bn = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !(bn > 0.0) {
        return Err(Error::DegeneratePencil);
    }
    // Householder H with first column ∝ u = conj(b)/‖b‖
    let u: Vec<Complex64> = b.iter().map(|v| v.conj() / bn).collect();
    let phase = if u[0].norm() > 0.0 { u[0] / u[0].norm() } else { Complex64::new(1.0, 0.0) };
    let mut v = u.clone();
    v[0] += phase;
    let vn2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let h = Mat::<Complex64>::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - 2.0 * v[i] * v[j].conj() / vn2
    });
    let sh = Mat::<Complex64>::from_fn(n, n, |i, j| sigma[i] * h[(i, j)]);
    let g = h.adjoint() * &sh;
    let h1: Vec<Complex64> = (0..n).map(|i| (0..n).map(|k| h[(k, i)].conj()).sum()).collect();
    let m = Mat::<Complex64>::from_fn(n - 1, n - 1, |i, j| g[(i + 1, j + 1)] - h1[i + 1] * g[(0, j + 1)] / h1[0]);
    let zeta = m.eigenvalues().map_err(|e| Error::LinearAlgebra(format!("eigenvalues: {e:?}")))?;
    Ok(zeta
        .into_iter()
        .filter(|z| z.norm() > 0.0)
        .map(|z| beta + 1.0 / z)
        .filter(|r| r.is_finite() && (r - center).norm() <= infinite_beyond)
        .collect())
}

macro_rules! rank_revealing_lstsq {
    ($name:ident, $t:ty, $abs:expr, $zero:expr) => {
        /// Least-squares solve of `a x = rhs` by QR with column pivoting.
        /// Columns whose pivot falls below `eps * |R_00|` are dropped and their
        /// coefficients set to zero (the basic solution). The looser
        /// `max(m, n) * eps` cutoff discards columns that still carry accuracy
        /// in the ill-conditioned MFS systems.
        pub fn $name(a: MatRef<'_, $t>, rhs: &[$t]) -> Result<Lstsq<$t>> {
            let (m, n) = (a.nrows(), a.ncols());
            if rhs.len() != m {
                return Err(Error::InvalidInput(format!("rhs has {} rows, matrix has {m}", rhs.len())));
            }
            if m < n {
                return Err(Error::InvalidInput(format!("underdetermined system {m} x {n}")));
            }
            if n == 0 {
                return Ok(Lstsq { x: Vec::new(), rank: 0, cols: 0 });
            }
            let qr = a.col_piv_qr();
            let r = qr.R();
            let abs = $abs;
            let r00 = abs(r[(0, 0)]);
            let tol = f64::EPSILON * r00;
            let rank = (0..n).take_while(|&i| abs(r[(i, i)]) > tol).count();
            let q = qr.compute_thin_Q();
            let b = Mat::from_fn(m, 1, |i, _| rhs[i]);
            let qtb = q.adjoint() * &b;
            let mut y = vec![$zero; rank];
            for i in (0..rank).rev() {
                let mut s = qtb[(i, 0)];
                for j in i + 1..rank {
                    s -= r[(i, j)] * y[j];
                }
                y[i] = s / r[(i, i)];
            }
            let perm = qr.P();
            let forward = perm.arrays().0;
            let mut x = vec![$zero; n];
            for (i, yi) in y.into_iter().enumerate() {
                x[forward[i]] = yi;
            }
            Ok(Lstsq { x, rank, cols: n })
        }
    };
}

rank_revealing_lstsq!(lstsq_complex, Complex64, |z: Complex64| z.norm(), Complex64::new(0.0, 0.0));
rank_revealing_lstsq!(lstsq_real, f64, |v: f64| v.abs(), 0.0);
