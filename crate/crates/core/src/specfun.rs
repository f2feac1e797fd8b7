//! Bessel functions `J_n`, `Y_n` and Hankel functions `H_n^(1)` of integer
//! order and real non-negative argument.
//!
//! Evaluation strategy, by argument range:
//!
//! * `x <= 2`: power series (no cancellation in this range).
//! * `2 < x < 25`: Miller backward recurrence for `J`, normalized with
//!   `J_0 + 2 sum J_2k = 1`; `Y_0`, `Y_1` from the Neumann series that reuse
//!   the same recurrence values.
//! * `x >= 25`: Hankel asymptotic expansions for orders 0 and 1, upward
//!   recurrence for `J_n` with `n <= x`, Miller recurrence above.
//!
//! `Y_n` is always obtained by upward recurrence from `Y_0`, `Y_1`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX: f64 = 2.0;
const ASYMPTOTIC_MIN: f64 = 25.0;
const RESCALE_AT: f64 = 1e250;

fn check_arg(x: f64, allow_zero: bool) -> Result<()> {
    if !x.is_finite() || x < 0.0 || (!allow_zero && x == 0.0) {
        return Err(Error::Domain(format!("Bessel argument must be {} and finite, got {x}", if allow_zero { "non-negative" } else { "positive" })));
    }
    Ok(())
}

/// Bessel function of the first kind `J_n(x)`, `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    check_arg(x, true)?;
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let n = n as usize;
    if series_ok(n, x) {
        return Ok(j_series(n, x));
    }
    if x >= ASYMPTOTIC_MIN && (n as f64) <= x {
        let (j0, j1, _, _) = asymptotic01(x);
        return Ok(upward(j0, j1, n, x)[n]);
    }
    Ok(miller(x, n).j[n])
}

/// Bessel function of the second kind `Y_n(x)`, `x > 0`.
pub fn bessel_y(n: u32, x: f64) -> Result<f64> {
    check_arg(x, false)?;
    let (y0, y1) = y01(x);
    let y = upward(y0, y1, n as usize, x);
    Ok(saturate(y[n as usize]))
}

/// Hankel function of the first kind `H_n^(1)(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(n: u32, x: f64) -> Result<Complex64> {
    check_arg(x, false)?;
    Ok(Complex64::new(bessel_j(n, x)?, bessel_y(n, x)?))
}

/// `[J_0(x), ..., J_nmax(x)]`.
pub fn bessel_j_seq(nmax: u32, x: f64) -> Result<Vec<f64>> {
    check_arg(x, true)?;
    let nmax = nmax as usize;
    if x == 0.0 {
        let mut out = vec![0.0; nmax + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if x <= SERIES_MAX {
        return Ok((0..=nmax).map(|n| j_series(n, x)).collect());
    }
    let mut out = if x < ASYMPTOTIC_MIN {
        let mut j = miller(x, nmax).j;
        j.truncate(nmax + 1);
        j
    } else {
        let (j0, j1, _, _) = asymptotic01(x);
        let upto = (x.floor() as usize).min(nmax);
        let mut out = upward(j0, j1, upto, x);
        out.truncate(upto + 1);
        if nmax > upto {
            let m = miller(x, nmax).j;
            out.extend_from_slice(&m[upto + 1..=nmax]);
        }
        out
    };
    for (n, v) in out.iter_mut().enumerate() {
        if series_ok(n, x) {
            *v = j_series(n, x);
        }
    }
    Ok(out)
}

/// `[Y_0(x), ..., Y_nmax(x)]`.
pub fn bessel_y_seq(nmax: u32, x: f64) -> Result<Vec<f64>> {
    check_arg(x, false)?;
    let (y0, y1) = y01(x);
    let mut y = upward(y0, y1, nmax as usize, x);
    y.truncate(nmax as usize + 1);
    y.iter_mut().for_each(|v| *v = saturate(*v));
    Ok(y)
}

/// `[H_0^(1)(x), ..., H_nmax^(1)(x)]`, elementwise identical to [`hankel1`].
pub fn hankel1_seq(nmax: u32, x: f64) -> Result<Vec<Complex64>> {
    let j = bessel_j_seq(nmax, x)?;
    let y = bessel_y_seq(nmax, x)?;
    Ok(j.into_iter().zip(y).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// Fast path for the multipole basis: fills `out[n] = H_n^(1)(x)` for
/// `n < out.len()` by upward recurrence on `H` itself, which is stable because
/// the `Y` component dominates for `n > x`. `x` must be positive.
pub(crate) fn hankel1_upward(x: f64, out: &mut [Complex64]) {
    let (j0, j1, y0, y1) = jy01(x);
    let mut prev = Complex64::new(j0, y0);
    let mut cur = Complex64::new(j1, y1);
    for (n, slot) in out.iter_mut().enumerate() {
        match n {
            0 => *slot = prev,
            1 => *slot = cur,
            _ => {
                let next = cur * (2.0 * (n as f64 - 1.0) / x) - prev;
                prev = cur;
                cur = next;
                *slot = cur;
            }
        }
    }
}

fn saturate(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::NEG_INFINITY
    }
}

/// `(J_0, J_1, Y_0, Y_1)` at `x > 0`.
fn jy01(x: f64) -> (f64, f64, f64, f64) {
    if x <= SERIES_MAX {
        let (j0, j1) = (j_series(0, x), j_series(1, x));
        let (y0, y1) = y01_series(x, j0, j1);
        (j0, j1, y0, y1)
    } else if x < ASYMPTOTIC_MIN {
        let m = miller(x, 1);
        (m.j[0], m.j[1], m.y0, m.y1)
    } else {
        asymptotic01(x)
    }
}

fn y01(x: f64) -> (f64, f64) {
    let (_, _, y0, y1) = jy01(x);
    (y0, y1)
}

/// Three-term upward recurrence `C_{n+1} = (2n/x) C_n - C_{n-1}`, returning
/// at least two entries.
fn upward(c0: f64, c1: f64, nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax.max(1) + 1);
    out.push(c0);
    out.push(c1);
    for n in 1..nmax {
        let next = (2.0 * n as f64 / x) * out[n] - out[n - 1];
        out.push(next);
    }
    out
}

/// The alternating power series loses at most about one digit when
/// `x^2 < 4 (n + 1)`.
fn series_ok(n: usize, x: f64) -> bool {
    x <= SERIES_MAX || x * x < 4.0 * (n + 1) as f64
}

fn j_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut pre = 1.0;
    for i in 1..=n {
        pre *= half / i as f64;
    }
    if pre == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= q / (m as f64 * (n + m) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    pre * sum
}

fn y01_series(x: f64, j0: f64, j1: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let q = half * half;
    let lg = half.ln() + EULER_GAMMA;

    // Y_0: sum_{m>=1} (-1)^{m+1} H_m q^m / (m!)^2
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut s0 = 0.0;
    for m in 1..100 {
        term *= -q / (m as f64 * m as f64);
        harmonic += 1.0 / m as f64;
        let t = -term * harmonic;
        s0 += t;
        if t.abs() < 1e-18 * s0.abs().max(1e-300) {
            break;
        }
    }
    let y0 = FRAC_2_PI * (lg * j0 + s0);

    // Y_1: -(1/pi) sum_k (-1)^k (H_k + H_{k+1}) half^{2k+1} / (k! (k+1)!)
    let mut term = half;
    let mut hk = 0.0;
    let mut s1 = term * (hk + 1.0);
    for k in 1..100 {
        term *= -q / (k as f64 * (k + 1) as f64);
        hk += 1.0 / k as f64;
        let t = term * (2.0 * hk + 1.0 / (k + 1) as f64);
        s1 += t;
        if t.abs() < 1e-18 * s1.abs() {
            break;
        }
    }
    let y1 = -FRAC_2_PI / x + FRAC_2_PI * lg * j1 - s1 / PI;
    (y0, y1)
}

/// Hankel asymptotic expansions for orders 0 and 1, `x >= 25`.
fn asymptotic01(x: f64) -> (f64, f64, f64, f64) {
    let (p0, q0) = asymptotic_pq(0.0, x);
    let (p1, q1) = asymptotic_pq(1.0, x);
    let (s, c) = x.sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // chi_0 = x - pi/4, chi_1 = x - 3pi/4, expanded to avoid rounding the phase.
    let (c0, s0) = ((c + s) * r, (s - c) * r);
    let (c1, s1) = ((s - c) * r, -(s + c) * r);
    let amp = (FRAC_2_PI / x).sqrt();
    (
        amp * (p0 * c0 - q0 * s0),
        amp * (p1 * c1 - q1 * s1),
        amp * (p0 * s0 + q0 * c0),
        amp * (p1 * s1 + q1 * c1),
    )
}

fn asymptotic_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // a_k / x^k alternates between Q (odd k) and P (even k) with sign (-1)^{floor(k/2)}.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (p, q)
}

struct Miller {
    j: Vec<f64>,
    y0: f64,
    y1: f64,
}

// 6.28 is the empirical coefficient of the start-order estimate, not 2π
#[allow(clippy::approx_constant)]
fn envelope(n: f64, x: f64) -> f64 {
    let n = n.max(1.0);
    0.5 * (6.28 * n).log10() - n * (1.36 * x / n).log10()
}

/// Smallest order whose `J` magnitude is about `10^-digits`.
fn start_by_magnitude(x: f64, digits: f64) -> usize {
    secant_order((1.1 * x).floor() + 1.0, x, digits)
}

/// Starting order giving `digits` significant digits for all orders up to `n`.
fn start_by_precision(x: f64, n: usize, digits: f64) -> usize {
    let half = 0.5 * digits;
    let ejn = envelope(n as f64, x);
    let (obj, n0) = if ejn <= half {
        (digits, (1.1 * x).floor() + 1.0)
    } else {
        (half + ejn, n as f64)
    };
    secant_order(n0, x, obj) + 10
}

fn secant_order(start: f64, x: f64, obj: f64) -> usize {
    let mut n0 = start.max(1.0);
    let mut f0 = envelope(n0, x) - obj;
    let mut n1 = n0 + 5.0;
    let mut f1 = envelope(n1, x) - obj;
    let mut nn = n1;
    for _ in 0..30 {
        if f1 == f0 {
            break;
        }
        nn = (n1 - (n1 - n0) / (1.0 - f0 / f1)).round();
        if (nn - n1).abs() < 1.0 {
            break;
        }
        let f = envelope(nn, x) - obj;
        n0 = n1;
        f0 = f1;
        n1 = nn;
        f1 = f;
    }
    nn.max(2.0) as usize
}

/// Miller backward recurrence for `J_0..=J_nmax` with the Neumann sums for
/// `Y_0` and `Y_1` accumulated along the way.
fn miller(x: f64, nmax: usize) -> Miller {
    let mut start = start_by_magnitude(x, 200.0);
    let top = if start < nmax {
        start
    } else {
        start = start_by_precision(x, nmax, 20.0);
        nmax
    };
    let start = start.max(top + 2);

    let mut j = vec![0.0; nmax.max(1) + 1];
    let (mut f2, mut f1) = (0.0f64, 1e-100f64);
    let (mut norm, mut su, mut sv) = (0.0, 0.0, 0.0);
    let mut f = 0.0;
    for k in (0..=start).rev() {
        f = 2.0 * (k + 1) as f64 / x * f1 - f2;
        if k <= top {
            j[k] = f;
        }
        if k % 2 == 0 && k != 0 {
            norm += 2.0 * f;
            let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            su += s * f / k as f64;
        } else if k > 1 && k % 2 == 1 {
            let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let kf = k as f64;
            sv += s * kf / (kf * kf - 1.0) * f;
        }
        f2 = f1;
        f1 = f;
        if f.abs() > RESCALE_AT {
            let scale = 1.0 / RESCALE_AT;
            f2 *= scale;
            f1 *= scale;
            f *= scale;
            norm *= scale;
            su *= scale;
            sv *= scale;
            for v in j.iter_mut().skip(k) {
                *v *= scale;
            }
        }
    }
    let s0 = norm + f;
    for v in j.iter_mut() {
        *v /= s0;
    }
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let y0 = FRAC_2_PI * (lg * j[0] - 4.0 * su / s0);
    let y1 = FRAC_2_PI * ((lg - 1.0) * j[1] - j[0] / x - 4.0 * sv / s0);
    Miller { j, y0, y1 }
}
