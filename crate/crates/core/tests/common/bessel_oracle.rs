//! Extended-precision power-series references for `J_n` and `Y_n`, valid for
//! moderate arguments (`x <= 20`), where double-double has ample headroom
//! over the series cancellation.

use super::dd::{Dd, EULER_GAMMA, PI};

fn factorial(n: u32) -> Dd {
    (1..=n).fold(Dd::from_f64(1.0), |acc, i| acc * Dd::from_f64(i as f64))
}

/// `J_n(x) = sum_m (-1)^m (x/2)^{2m+n} / (m! (m+n)!)`.
pub fn bessel_j(n: u32, x: f64) -> Dd {
    let half = Dd::from_f64(x) / Dd::from_f64(2.0);
    let q = half * half;
    let mut term = half.powi(n) / factorial(n);
    let mut sum = term;
    for m in 1..400u32 {
        term = -(term * q) / Dd::from_f64((m * (m + n)) as f64);
        sum = sum + term;
        if term.abs().hi < 1e-34 * sum.abs().hi {
            break;
        }
    }
    sum
}

/// `Y_0(x) = (2/pi) [(ln(x/2) + gamma) J_0(x) + sum_{m>=1} (-1)^{m+1} H_m (x/2)^{2m} / (m!)^2]`.
pub fn bessel_y0(x: f64) -> Dd {
    let half = Dd::from_f64(x) / Dd::from_f64(2.0);
    let q = half * half;
    let mut term = Dd::from_f64(1.0);
    let mut h = Dd::from_f64(0.0);
    let mut sum = Dd::from_f64(0.0);
    for m in 1..400u32 {
        term = -(term * q) / Dd::from_f64((m * m) as f64);
        h = h + Dd::from_f64(1.0) / Dd::from_f64(m as f64);
        let t = -(term * h);
        sum = sum + t;
        if t.abs().hi < 1e-34 * sum.abs().hi.max(1e-300) {
            break;
        }
    }
    let lg = half.ln() + EULER_GAMMA;
    Dd::from_f64(2.0) / PI * (lg * bessel_j(0, x) + sum)
}

/// `Y_1(x) = -2/(pi x) + (2/pi)(ln(x/2)+gamma) J_1(x)
///           - (1/pi) sum_k (-1)^k (H_k + H_{k+1}) (x/2)^{2k+1} / (k! (k+1)!)`.
pub fn bessel_y1(x: f64) -> Dd {
    let xd = Dd::from_f64(x);
    let half = xd / Dd::from_f64(2.0);
    let q = half * half;
    let one = Dd::from_f64(1.0);
    let mut term = half;
    let mut hk = Dd::from_f64(0.0);
    let mut sum = term;
    for k in 1..400u32 {
        term = -(term * q) / Dd::from_f64((k * (k + 1)) as f64);
        hk = hk + one / Dd::from_f64(k as f64);
        let t = term * (hk + hk + one / Dd::from_f64((k + 1) as f64));
        sum = sum + t;
        if t.abs().hi < 1e-34 * sum.abs().hi {
            break;
        }
    }
    let two_pi = Dd::from_f64(2.0) / PI;
    let lg = half.ln() + EULER_GAMMA;
    -(two_pi / xd) + two_pi * lg * bessel_j(1, x) - sum / PI
}

/// `Y_n` by upward recurrence in double-double.
pub fn bessel_y(n: u32, x: f64) -> Dd {
    let (mut a, mut b) = (bessel_y0(x), bessel_y1(x));
    if n == 0 {
        return a;
    }
    let xd = Dd::from_f64(x);
    for k in 1..n {
        let c = Dd::from_f64((2 * k) as f64) / xd * b - a;
        a = b;
        b = c;
    }
    b
}
