//! Built-in curve library and random smooth Jordan curves.
//!
//! `corral`, `sharktooth` and `pacman` are qualitative stand-ins: concave
//! enclosure, two-corner lens, and a disk with a smoothed radial slit.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{ParametricCurve, JORDAN_POLYLINE};
use crate::error::{Error, Result};

const MAX_REJECTIONS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub enum CurveSpec {
    Circle { radius: f64, center: Complex64 },
    Ellipse { a: f64, b: f64 },
    Starfish,
    Trefoil,
    CrescentGc,
    Corral,
    Sharktooth,
    Pacman,
    Random { seed: u64, n_modes: usize, decay: f64 },
}

impl CurveSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CurveSpec::Circle { .. } => "circle",
            CurveSpec::Ellipse { .. } => "ellipse",
            CurveSpec::Starfish => "starfish",
            CurveSpec::Trefoil => "trefoil",
            CurveSpec::CrescentGc => "crescent_gc",
            CurveSpec::Corral => "corral",
            CurveSpec::Sharktooth => "sharktooth",
            CurveSpec::Pacman => "pacman",
            CurveSpec::Random { .. } => "random",
        }
    }

    /// Curves with corners or near-corners; expected accuracy is reduced.
    pub fn has_corners(&self) -> bool {
        matches!(self, CurveSpec::Sharktooth | CurveSpec::Pacman)
    }
}

fn parse_kv(args: &str) -> Result<Vec<(String, String)>> {
    args.split(',')
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::InvalidInput(format!("bad value `{v}` for `{key}`")))
}

impl FromStr for CurveSpec {
    type Err = Error;

    /// `name` or `name:key=value,...`, e.g. `random:seed=42`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let kv = parse_kv(args)?;
        let unknown = |k: &str| Error::InvalidInput(format!("unknown parameter `{k}` for curve `{name}`"));
        let mut spec = match name.trim() {
            "circle" => CurveSpec::Circle { radius: 1.0, center: Complex64::new(0.0, 0.0) },
            "ellipse" => CurveSpec::Ellipse { a: 1.0, b: 0.5 },
            "starfish" => CurveSpec::Starfish,
            "trefoil" => CurveSpec::Trefoil,
            "crescent_gc" | "crescent" => CurveSpec::CrescentGc,
            "corral" => CurveSpec::Corral,
            "sharktooth" => CurveSpec::Sharktooth,
            "pacman" => CurveSpec::Pacman,
            "random" => CurveSpec::Random { seed: 0, n_modes: 6, decay: 1.7 },
            other => return Err(Error::UnknownCurve(other.to_string())),
        };
        for (k, v) in &kv {
            match (&mut spec, k.as_str()) {
                (CurveSpec::Circle { radius, .. }, "r") => *radius = num(k, v)?,
                (CurveSpec::Circle { center, .. }, "cx") => center.re = num(k, v)?,
                (CurveSpec::Circle { center, .. }, "cy") => center.im = num(k, v)?,
                (CurveSpec::Ellipse { a, .. }, "a") => *a = num(k, v)?,
                (CurveSpec::Ellipse { b, .. }, "b") => *b = num(k, v)?,
                (CurveSpec::Random { seed, .. }, "seed") => *seed = num(k, v)?,
                (CurveSpec::Random { n_modes, .. }, "modes") => *n_modes = num(k, v)?,
                (CurveSpec::Random { decay, .. }, "decay") => *decay = num(k, v)?,
                _ => return Err(unknown(k)),
            }
        }
        Ok(spec)
    }
}

fn radial(label: &str, analytic: bool, r: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ParametricCurve {
    ParametricCurve::new(label, analytic, move |t| {
        let th = PI * t;
        Complex64::from_polar(r(th), th)
    })
}

/// Generalized crescent Z_GC(πt).
pub fn crescent_gc(t: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, PI * t);
    e - 0.1 / (e + 0.9) - Complex64::new(0.07, 0.02) / (e - Complex64::new(0.8, 0.2)) + 0.2 / (e - Complex64::new(0.2, -0.5))
}

/// Circular arc from `a` to `b` about `center`, counterclockwise, at fraction `s` ∈ [0, 1].
fn arc(center: Complex64, a: Complex64, b: Complex64, s: f64) -> Complex64 {
    let (ra, rb) = (a - center, b - center);
    let (ta, mut tb) = (ra.arg(), rb.arg());
    while tb <= ta {
        tb += 2.0 * PI;
    }
    center + Complex64::from_polar(ra.norm(), ta + s * (tb - ta))
}

pub fn make_curve(spec: &CurveSpec) -> Result<ParametricCurve> {
    let curve = match *spec {
        CurveSpec::Circle { radius, center } => {
            if !(radius > 0.0) {
                return Err(Error::InvalidInput(format!("circle radius must be positive, got {radius}")));
            }
            ParametricCurve::circle(center, radius)
        }
        CurveSpec::Ellipse { a, b } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::InvalidInput("ellipse semi-axes must be positive".into()));
            }
            ParametricCurve::new(format!("ellipse(a={a}, b={b})"), true, move |t| Complex64::new(a * (PI * t).cos(), b * (PI * t).sin()))
        }
        CurveSpec::Starfish => radial("starfish", true, |th| 1.0 + 0.3 * (5.0 * th).cos()),
        CurveSpec::Trefoil => radial("trefoil", true, |th| 1.0 + 0.3 * (3.0 * th).cos()),
        CurveSpec::CrescentGc => ParametricCurve::new("crescent_gc", true, crescent_gc),
        CurveSpec::Corral => radial("corral", true, |th| {
            1.0 + 0.15 * (2.0 * th).cos() - 0.55 * (-6.0 * (1.0 - th.cos())).exp()
        }),
        CurveSpec::Sharktooth => {
            let (l, r) = (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0));
            let (upper, lower) = (Complex64::new(0.0, -0.6), Complex64::new(0.0, 2.0));
            ParametricCurve::new("sharktooth", false, move |t| {
                if t >= 0.0 {
                    arc(upper, r, l, t)
                } else {
                    arc(lower, l, r, t + 1.0)
                }
            })
        }
        CurveSpec::Pacman => radial("pacman", false, |th| {
            let d = 2.0 * (th / 2.0).sin();
            1.0 - 0.85 * (-(d / 0.15).powi(4)).exp()
        }),
        CurveSpec::Random { seed, n_modes, decay } => random_jordan(seed, n_modes, decay)?,
    };
    curve.validate()?;
    Ok(curve)
}

/// Star-shaped curve with radius `1 + Σ a_m cos(mπt + φ_m)`, `|a_m| ≤ 0.45 m^(−decay)`,
/// rejection-sampled until simple with `|Γ′| > 0.05`.
pub fn random_jordan(seed: u64, n_modes: usize, decay: f64) -> Result<ParametricCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let modes: Vec<(f64, f64)> = (1..=n_modes)
            .map(|m| {
                let bound = 0.45 * (m as f64).powf(-decay);
                (rng.gen_range(-bound..=bound), rng.gen_range(0.0..2.0 * PI))
            })
            .collect();
        let curve = radial_modes(format!("random(seed={seed})"), modes);
        if curve.validate().is_ok() && curve.min_speed(JORDAN_POLYLINE) > 0.05 {
            return Ok(curve);
        }
    }
    Err(Error::CurveDegenerate(format!("random curve (seed {seed}) rejected {MAX_REJECTIONS} times")))
}

/// Curve with radius `1 + Σ_m a_m cos(mπt + φ_m)` for `(a_m, φ_m)` indexed from `m = 1`.
pub fn radial_modes(label: String, modes: Vec<(f64, f64)>) -> ParametricCurve {
    radial(&label, true, move |th| {
        1.0 + modes.iter().enumerate().map(|(i, (a, phi))| a * ((i + 1) as f64 * th + phi).cos()).sum::<f64>()
    })
}
