use aaals::aaa::aaa_fit;
use aaals::barycentric::{BarycentricRational, SPURIOUS_RESIDUE};
use aaals::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn circle(n: usize, r: f64) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::from_polar(r, 2.0 * PI * j as f64 / n as f64)).collect()
}

fn fit(f: impl Fn(Complex64) -> Complex64) -> BarycentricRational {
    let z = circle(256, 1.0);
    let fz: Vec<Complex64> = z.iter().map(|&z| f(z)).collect();
    aaa_fit(&fz, &z, 1e-13, 100).unwrap().approx
}

#[test]
fn linear_data_reproduced_between_nodes() {
    let s = vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)];
    // polynomial-interpolation weights 1/prod(s_j - s_k)
    let w: Vec<Complex64> =
        (0..3).map(|j| 1.0 / (0..3).filter(|&k| k != j).map(|k| s[j] - s[k]).product::<Complex64>()).collect();
    let r = BarycentricRational::new(s.clone(), s, w).unwrap();
    assert!((r.eval(c(0.5, 0.0)) - 0.5).norm() <= 1e-15, "{}", r.eval(c(0.5, 0.0)));
}

#[test]
fn fit_of_simple_pole_evaluates_at_origin() {
    let r = fit(|z| 1.0 / (z - 2.0));
    assert!((r.eval(c(0.0, 0.0)) + 0.5).norm() <= 1e-13);
}

#[test]
fn fit_of_simple_pole_has_one_pole_at_two() {
    let r = fit(|z| 1.0 / (z - 2.0));
    let ps = r.poles_zeros_residues().unwrap().significant(SPURIOUS_RESIDUE, 1.0);
    assert_eq!(ps.poles.len(), 1, "{:?}", ps.poles);
    assert!((ps.poles[0] - 2.0).norm() <= 1e-12, "{}", ps.poles[0]);
    assert!((ps.residues[0] - 1.0).norm() <= 1e-10);
}

#[test]
fn polynomial_fit_has_no_significant_poles() {
    let r = fit(|z| z);
    let ps = r.poles_zeros_residues().unwrap();
    let scale = r.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    assert!(ps.significant(SPURIOUS_RESIDUE, scale).is_empty(), "{:?}", ps);
}

#[test]
fn mobius_fit_recovers_zero_and_pole() {
    let r = fit(|z| (z - 3.0) / (z - 2.0));
    let ps = r.poles_zeros_residues().unwrap();
    assert!(ps.poles.iter().any(|p| (p - 2.0).norm() <= 1e-12), "{:?}", ps.poles);
    assert!(ps.zeros.iter().any(|z| (z - 3.0).norm() <= 1e-12), "{:?}", ps.zeros);
}

#[test]
fn square_derivatives() {
    let r = fit(|z| z * z);
    let z = c(0.3, 0.1);
    assert!((r.derivative(z, 1).unwrap() - c(0.6, 0.2)).norm() <= 1e-12);
    let s0 = r.support()[0];
    assert!((r.derivative(s0, 2).unwrap() - 2.0).norm() <= 1e-10);
}

#[test]
fn eval_at_support_point_is_exact() {
    let r = fit(|z| (3.0 * z).exp() / (z - 1.5));
    for (s, f) in r.support().iter().zip(r.values()) {
        assert_eq!(r.eval(*s), *f);
    }
}

#[test]
fn degenerate_pencil_reported() {
    let r = BarycentricRational::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]);
    assert!(matches!(r, Err(aaals::Error::DegeneratePencil)));
}

fn distinct_points() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..12).prop_filter_map("distinct", |v| {
        let pts: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
        let ok = pts.iter().enumerate().all(|(i, a)| pts[..i].iter().all(|b| (a - b).norm() > 1e-3));
        ok.then_some(pts)
    })
}

fn unit_complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
}

/// A few separated simple poles off the unit circle, with residues of order one.
fn pole_residue_sets() -> impl Strategy<Value = Vec<(Complex64, Complex64)>> {
    prop::collection::vec((1.3f64..2.2, 0.0f64..1.0, 0.5f64..1.5, 0.0f64..(2.0 * PI)), 1..4).prop_map(|v| {
        let n = v.len();
        // spread the angles evenly so poles stay well separated
        v.into_iter()
            .enumerate()
            .map(|(i, (r, jit, rm, ra))| {
                let th = 2.0 * PI * (i as f64 + 0.3 * jit) / n as f64;
                (Complex64::from_polar(r, th), Complex64::from_polar(rm, ra))
            })
            .collect()
    })
}

fn sum_of_poles(set: &[(Complex64, Complex64)], z: Complex64) -> Complex64 {
    set.iter().map(|(p, a)| a / (z - p)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interpolates_at_every_support_point(
        s in distinct_points(),
        seed in prop::collection::vec((unit_complex(), unit_complex()), 12),
    ) {
        let n = s.len();
        let values: Vec<Complex64> = seed[..n].iter().map(|p| p.0).collect();
        let mut weights: Vec<Complex64> = seed[..n].iter().map(|p| p.1).collect();
        weights[0] += 1.5;
        let r = BarycentricRational::new(s.clone(), values.clone(), weights).unwrap();
        for (sj, fj) in s.iter().zip(&values) {
            prop_assert_eq!(r.eval(*sj), *fj);
        }
    }

    #[test]
    fn synthetic_poles_recovered(set in pole_residue_sets()) {
        let r = fit(|z| sum_of_poles(&set, z));
        let ps = r.poles_zeros_residues().unwrap().significant(1e-8, 1.0);
        prop_assert_eq!(ps.poles.len(), set.len());
        for (p, _) in &set {
            let d = ps.poles.iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(d <= 1e-10, "pole {} missed by {:e}", p, d);
        }
    }

    #[test]
    fn pole_residue_expansion_reconstructs_fit(set in pole_residue_sets()) {
        let r = fit(|z| sum_of_poles(&set, z));
        let ps = r.poles_zeros_residues().unwrap();
        let test = circle(97, 0.7);
        for z in test {
            let partial: Complex64 = ps.poles.iter().zip(&ps.residues).map(|(p, a)| a / (z - p)).sum();
            prop_assert!((r.eval(z) - partial).norm() <= 1e-10, "at {}: {:e}", z, (r.eval(z) - partial).norm());
        }
    }

    #[test]
    fn derivative_matches_central_difference(set in pole_residue_sets(), t in 0.0f64..1.0, rad in 0.2f64..0.9) {
        let r = fit(|z| sum_of_poles(&set, z) + z * z);
        let z = Complex64::from_polar(rad, 2.0 * PI * t);
        let h = 1e-6;
        let fd = (r.eval(z + h) - r.eval(z - h)) / (2.0 * h);
        let d1 = r.derivative(z, 1).unwrap();
        prop_assert!((d1 - fd).norm() <= 1e-6 * d1.norm().max(1.0), "{} vs {}", d1, fd);
    }

    #[test]
    fn second_derivative_is_derivative_of_first(set in pole_residue_sets(), t in 0.0f64..1.0, rad in 0.2f64..0.9) {
        let r = fit(|z| sum_of_poles(&set, z));
        let z = Complex64::from_polar(rad, 2.0 * PI * t);
        let h = 1e-4;
        // fourth-order stencil keeps truncation below the tolerance
        let d = |w: Complex64| r.derivative(w, 1).unwrap();
        let fd = (d(z - 2.0 * h) - 8.0 * d(z - h) + 8.0 * d(z + h) - d(z + 2.0 * h)) / (12.0 * h);
        let d2 = r.derivative(z, 2).unwrap();
        prop_assert!((d2 - fd).norm() <= 1e-8 * d2.norm().max(1.0), "{} vs {}", d2, fd);
    }
}
