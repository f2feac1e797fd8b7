// reference values are tabulated beyond f64 precision on purpose
#![allow(clippy::excessive_precision)]

mod common;

use aaals::specfun::{bessel_j, bessel_j_seq, bessel_y, bessel_y_seq, hankel1};
use common::bessel_oracle;
use std::f64::consts::PI;

/// Error measure that is relative where the function is large and relative to
/// the oscillation envelope near its zeros (`n < x`).
fn scaled_err(got: f64, want: f64, n: u32, x: f64) -> f64 {
    let env = if (n as f64) < x { (2.0 / (PI * x)).sqrt() } else { 0.0 };
    (got - want).abs() / want.abs().max(env).max(1e-300)
}

#[test]
fn j0_at_one_matches_series_oracle() {
    let want = bessel_oracle::bessel_j(0, 1.0).to_f64();
    let got = bessel_j(0, 1.0).unwrap();
    assert!((got - want).abs() <= 1e-13 * want.abs(), "{got} vs {want}");
}

#[test]
fn y0_at_one_matches_series_oracle() {
    let want = bessel_oracle::bessel_y0(1.0).to_f64();
    let got = bessel_y(0, 1.0).unwrap();
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
}

#[test]
fn hankel1_order_one_at_2_5_matches_oracle() {
    let j = bessel_oracle::bessel_j(1, 2.5).to_f64();
    let y = bessel_oracle::bessel_y1(2.5).to_f64();
    let h = hankel1(1, 2.5).unwrap();
    assert!((h.re - j).abs() <= 1e-12 * j.abs());
    assert!((h.im - y).abs() <= 1e-12 * y.abs());
}

#[test]
fn y2_at_5_satisfies_wronskian() {
    let (x, n) = (5.0, 2u32);
    let w = bessel_j(n + 1, x).unwrap() * bessel_y(n, x).unwrap()
        - bessel_j(n, x).unwrap() * bessel_y(n + 1, x).unwrap();
    let want = 2.0 / (PI * x);
    assert!((w - want).abs() <= 1e-12 * want);
}

#[test]
fn moderate_arguments_match_series_oracle() {
    let xs = [1e-3, 0.05, 0.4, 1.0, 1.7, 2.0, 2.3, 3.9, 6.25, 8.0, 11.5, 14.0, 17.7, 20.0];
    let ns = [0u32, 1, 2, 3, 4, 9, 16, 25, 40, 60];
    let mut worst_j = 0.0f64;
    let mut worst_y = 0.0f64;
    for &x in &xs {
        for &n in &ns {
            let jr = bessel_oracle::bessel_j(n, x).to_f64();
            worst_j = worst_j.max(scaled_err(bessel_j(n, x).unwrap(), jr, n, x));
            let yr = bessel_oracle::bessel_y(n, x).to_f64();
            if yr.is_finite() && yr.abs() < 1e300 {
                worst_y = worst_y.max(scaled_err(bessel_y(n, x).unwrap(), yr, n, x));
            }
        }
    }
    assert!(worst_j <= 1e-13, "worst J error {worst_j:e}");
    assert!(worst_y <= 1e-12, "worst Y error {worst_y:e}");
}

/// Frozen 40-digit mpmath values (tests/data/gen_bessel_reference.py).
const LARGE_ARGUMENT_REFERENCE: &[(u32, f64, f64, f64)] = &[
    (0, 30_f64, -8.6367983581040211e-2, -1.1729573168666403e-1),
    (1, 30_f64, -1.1875106261662294e-1, 8.4425570661747235e-2),
    (2, 30_f64, 7.8451246073265349e-2, 1.2292410306411384e-1),
    (7, 30_f64, 1.4518518957232827e-1, 2.7202118395205592e-2),
    (30, 30_f64, 1.4393585001030721e-1, -2.4937439396697415e-1),
    (100, 30_f64, 4.5788015281752445e-42, -7.2875284708244715e+38),
    (200, 30_f64, 6.8211185702446325e-141, -2.3599689078865491e+137),
    (0, 47.5_f64, -1.0608271415889354e-1, 4.6349081029890632e-2),
    (1, 47.5_f64, 4.5235110474968016e-2, 1.0657641833893293e-1),
    (2, 47.5_f64, 1.0798735038941851e-1, -4.1861652889303983e-2),
    (7, 47.5_f64, 1.2163128990811131e-2, -1.157655291040656e-1),
    (30, 47.5_f64, -1.3143316674465225e-1, 8.2021471058907023e-4),
    (100, 47.5_f64, 1.2565174603997332e-23, -2.878837102959063e+20),
    (200, 47.5_f64, 1.019661009844888e-101, -1.6068382470157274e+98),
    (0, 100_f64, 1.9985850304223122e-2, -7.7244313365083152e-2),
    (1, 100_f64, -7.7145352014112158e-2, -2.0372312002759793e-2),
    (2, 100_f64, -2.1528757344505366e-2, 7.6836867125027956e-2),
    (7, 100_f64, 7.017269098721272e-2, 3.8178048317133429e-2),
    (30, 100_f64, 8.1460129581172223e-2, 6.1388392120100335e-3),
    (100, 100_f64, 9.636667329586156e-2, -1.6692141141757651e-1),
    (200, 100_f64, 2.0594424939411679e-41, -8.9236648125530524e+37),
    (0, 333.25_f64, 3.738455457605768e-2, -2.2643538378675057e-2),
    (1, 333.25_f64, -2.2587473136725056e-2, -3.7418570378667498e-2),
    (2, 333.25_f64, -3.7520113304560156e-2, 2.2418970814512012e-2),
    (7, 333.25_f64, 1.9838492943091711e-2, 3.8951129910083175e-2),
    (30, 333.25_f64, -3.0303612790504195e-2, -3.1619831941296974e-2),
    (100, 333.25_f64, -1.8966315693974348e-2, 4.0532721859793987e-2),
    (200, 333.25_f64, 1.1808164629207401e-2, -4.7421507038827508e-2),
    (0, 999_f64, 1.7369296355194132e-2, -1.8318419519867725e-2),
    (1, 999_f64, -1.8309728474911622e-2, -1.737846690654301e-2),
    (2, 999_f64, -1.7405952468257018e-2, 1.8283627794329101e-2),
    (7, 999_f64, 1.7887197943320726e-2, 1.78134989245041e-2),
    (30, 999_f64, -2.3617664766434011e-2, 8.9303076411009377e-3),
    (100, 999_f64, -1.2468876435018401e-2, -2.2022736574306031e-2),
    (200, 999_f64, 2.3222487621978799e-2, 1.0542335423474866e-2),
];

#[test]
fn large_arguments_match_reference_table() {
    for &(n, x, j, y) in LARGE_ARGUMENT_REFERENCE {
        let ej = scaled_err(bessel_j(n, x).unwrap(), j, n, x);
        let ey = scaled_err(bessel_y(n, x).unwrap(), y, n, x);
        assert!(ej <= 1e-13, "J_{n}({x}) err {ej:e}");
        assert!(ey <= 1e-12, "Y_{n}({x}) err {ey:e}");
    }
}

#[test]
fn wronskian_on_log_grid() {
    for i in 0..=120 {
        let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 120.0);
        let j = bessel_j_seq(61, x).unwrap();
        let y = bessel_y_seq(61, x).unwrap();
        let want = 2.0 / (PI * x);
        for n in [0usize, 1, 2, 3, 5, 10, 20, 40, 60] {
            if !y[n + 1].is_finite() || y[n + 1].abs() > 1e290 {
                continue;
            }
            let w = j[n + 1] * y[n] - j[n] * y[n + 1];
            assert!((w - want).abs() <= 1e-12 * want, "n={n} x={x}: {w} vs {want}");
        }
    }
}

#[test]
fn three_term_recurrence_consistency() {
    for &x in &[0.01, 0.9, 3.0, 9.5, 22.0, 26.0, 75.0, 500.0] {
        let j = bessel_j_seq(51, x).unwrap();
        let jmax = j.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for n in 1..=50 {
            let r = j[n - 1] + j[n + 1] - (2.0 * n as f64 / x) * j[n];
            assert!(r.abs() <= 1e-11 * jmax, "n={n} x={x}: {r:e}");
        }
    }
}
