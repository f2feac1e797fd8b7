use aaals_web::{curve_names, disk_values, Scatterer};
use aaals::curves::make_curve;
use aaals::Complex64;

#[test]
fn disk_solve_agrees_with_the_exact_series() {
    let s = Scatterer::solve("circle", 5.0, 0.3).unwrap();
    assert!(s.residual() <= 1e-9 && !s.degraded());
    let bbox = [-2.0, 2.0, -2.0, 2.0];
    let exact = disk_values(5.0, 0.3, 21, 21, bbox, true).unwrap();
    let got = s.field(21, 21, bbox[0], bbox[1], bbox[2], bbox[3], true);
    assert_eq!(got.len(), exact.len());
    let nodes = (0..21).flat_map(|j| (0..21).map(move |i| Complex64::new(-2.0 + 0.2 * i as f64, -2.0 + 0.2 * j as f64)));
    for ((g, e), z) in got.iter().zip(&exact).zip(nodes) {
        // nodes on the circle itself may fall either side of the polygonal mask
        if (z.norm() - 1.0).abs() < 1e-9 {
            continue;
        }
        assert_eq!(g.is_nan(), e.is_nan(), "mask differs at {z}");
        if !g.is_nan() {
            assert!((g - e).abs() <= 1e-7, "{g} vs {e}");
        }
    }
}

#[test]
fn field_masks_the_obstacle_and_sources_lie_inside() {
    let s = Scatterer::solve("starfish", 4.0, 0.0).unwrap();
    let g = make_curve(&"starfish".parse().unwrap()).unwrap();
    let f = s.field(3, 3, -0.1, 0.1, -0.1, 0.1, false);
    assert!(f.iter().all(|v| v.is_nan()));
    let src = s.sources();
    assert_eq!(src.len() % 2, 0);
    for p in src.chunks(2) {
        assert!(g.contains(Complex64::new(p[0], p[1])));
    }
    assert_eq!(s.outline(50).len(), 100);
}

#[test]
fn every_listed_curve_parses() {
    for name in curve_names().split(',') {
        assert!(make_curve(&name.parse().unwrap()).is_ok(), "{name}");
    }
    assert!(Scatterer::solve("no-such-curve", 1.0, 0.0).is_err());
}
