use aaals::curve::JORDAN_POLYLINE;
use aaals::curves::{crescent_gc, make_curve, radial_modes, random_jordan, CurveSpec};
use aaals::Complex64;

const LIBRARY: [&str; 8] = ["circle", "ellipse", "starfish", "trefoil", "crescent_gc", "corral", "sharktooth", "pacman"];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn starfish_starts_at_its_outer_radius() {
    let g = make_curve(&CurveSpec::Starfish).unwrap();
    assert!((g.point(0.0) - 1.3).norm() <= 1e-15);
}

#[test]
fn crescent_matches_its_formula_at_zero() {
    // e^{i0} = 1 in every term
    let want = 1.0 - 0.1 / 1.9 - c(0.07, 0.02) / c(0.2, -0.2) + 0.2 / c(0.8, 0.5);
    assert!((crescent_gc(0.0) - want).norm() <= 1e-15);
    let g = make_curve(&CurveSpec::CrescentGc).unwrap();
    assert_eq!(g.point(0.0), crescent_gc(0.0));
}

#[test]
fn zero_amplitudes_give_the_unit_circle() {
    let g = radial_modes("flat".into(), vec![(0.0, 0.3); 6]);
    for t in [-1.0, -0.3, 0.0, 0.77] {
        assert!((g.point(t).norm() - 1.0).abs() <= 1e-15);
    }
}

#[test]
fn random_curves_are_almost_always_accepted() {
    let ok = (0..100u64).filter(|&s| random_jordan(s, 6, 1.7).is_ok()).count();
    assert!(ok >= 95, "{ok}/100 seeds produced a curve");
}

#[test]
fn random_curves_are_reproducible_and_regular() {
    for seed in [1u64, 7, 42] {
        let a = random_jordan(seed, 6, 1.7).unwrap();
        let b = random_jordan(seed, 6, 1.7).unwrap();
        for t in aaals::curve::ParametricCurve::params(257) {
            assert_eq!(a.point(t).re.to_bits(), b.point(t).re.to_bits());
            assert_eq!(a.point(t).im.to_bits(), b.point(t).im.to_bits());
        }
        assert!(a.min_speed(JORDAN_POLYLINE) > 0.05);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }
    assert_ne!(random_jordan(1, 6, 1.7).unwrap().fingerprint(), random_jordan(2, 6, 1.7).unwrap().fingerprint());
}

#[test]
fn aggressive_parameters_give_up() {
    assert!(random_jordan(3, 12, -2.0).is_err());
}

#[test]
fn library_curves_are_closed_and_counterclockwise() {
    for name in LIBRARY {
        let g = make_curve(&name.parse().unwrap()).unwrap();
        assert!((g.point(-1.0) - g.point(1.0)).norm() <= 1e-14 * g.scale(), "{name} is not closed");
        assert!(g.signed_area() > 0.0, "{name} is clockwise");
        assert_eq!(g.winding_number(g.centroid()), 1, "{name}");
    }
}

#[test]
fn analytic_library_curves_have_schwarz_functions() {
    for name in ["circle", "ellipse", "starfish", "trefoil", "crescent_gc", "corral"] {
        let g = make_curve(&name.parse().unwrap()).unwrap();
        let opts = aaals::continuum_aaa::AaazpOptions { mmax: 300, ..aaals::continuum_aaa::AaazpOptions::with_tol(1e-10) };
        let fit = aaals::continuum_aaa::aaazp(|_, z| z.conj(), &g, &opts).unwrap();
        assert!(fit.converged && fit.max_error <= 1e-10 * fit.norm, "{name}: error {:e}", fit.max_error);
        assert!(fit.degree() <= 300);
    }
}
