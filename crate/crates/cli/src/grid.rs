//! Rectangular evaluation grids and their CSV form.

use std::io::Write;
use std::str::FromStr;

use aaals::curve::ParametricCurve;
use aaals::Complex64;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// `--grid nx,ny` (box fitted to the curve) or `--grid nx,ny,x_min,x_max,y_min,y_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridArg {
    pub nx: usize,
    pub ny: usize,
    pub bbox: Option<[f64; 4]>,
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 2 && parts.len() != 6 {
            return Err(format!("expected nx,ny or nx,ny,x_min,x_max,y_min,y_max, got `{s}`"));
        }
        let n = |v: &str| v.parse::<usize>().map_err(|_| format!("bad grid size `{v}`"));
        let (nx, ny) = (n(parts[0])?, n(parts[1])?);
        if nx < 2 || ny < 2 {
            return Err(format!("grid needs at least 2 nodes per axis, got {nx}x{ny}"));
        }
        let bbox = if parts.len() == 6 {
            let mut b = [0.0f64; 4];
            for (slot, v) in b.iter_mut().zip(&parts[2..]) {
                *slot = v.parse().map_err(|_| format!("bad grid bound `{v}`"))?;
                if !slot.is_finite() {
                    return Err(format!("grid bound `{v}` is not finite"));
                }
            }
            if !(b[0] < b[1] && b[2] < b[3]) {
                return Err(format!("empty grid box `{s}`"));
            }
            Some(b)
        } else {
            None
        };
        Ok(GridArg { nx, ny, bbox })
    }
}

impl GridArg {
    /// Resolves the box, defaulting to the curve's bounding box padded by half
    /// its larger side on every edge.
    pub fn resolve(&self, curve: &ParametricCurve) -> GridSpec {
        let [x_min, x_max, y_min, y_max] = self.bbox.unwrap_or_else(|| {
            let pts = curve.sample(1024);
            let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
            for z in &pts {
                lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
                hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
            }
            let pad = 0.5 * (hi.re - lo.re).max(hi.im - lo.im);
            [lo.re - pad, hi.re + pad, lo.im - pad, hi.im + pad]
        });
        GridSpec { nx: self.nx, ny: self.ny, x_min, x_max, y_min, y_max }
    }
}

impl GridSpec {
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let x = self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64;
        let y = self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64;
        Complex64::new(x, y)
    }
}

/// Field values on a grid; masked cells hold no value.
pub struct FieldGrid {
    /// Row-major in y, then x.
    pub cells: Vec<(Complex64, Option<Complex64>)>,
}

impl FieldGrid {
    /// Evaluates `f` at every node where `masked` is false, one row per task.
    pub fn evaluate(
        spec: GridSpec,
        masked: impl Fn(Complex64) -> bool + Sync,
        f: impl Fn(Complex64) -> Complex64 + Sync,
    ) -> Self {
        let cells = (0..spec.ny)
            .into_par_iter()
            .flat_map_iter(|j| {
                let (masked, f) = (&masked, &f);
                (0..spec.nx).map(move |i| {
                    let z = spec.node(i, j);
                    (z, if masked(z) { None } else { Some(f(z)) })
                })
            })
            .collect();
        Self { cells }
    }

    /// Writes `x,y,re,im,mask` with 17 significant digits; masked cells carry
    /// `NaN` values and mask 1.
    pub fn write_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "re", "im", "mask"])?;
        let fmt = |v: f64| format!("{v:.16e}");
        for (z, v) in &self.cells {
            let (re, im, mask) = match v {
                Some(v) => (fmt(v.re), fmt(v.im), "0"),
                None => ("NaN".to_string(), "NaN".to_string(), "1"),
            };
            w.write_record([fmt(z.re), fmt(z.im), re, im, mask.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid_args() {
        assert_eq!("3,4".parse::<GridArg>().unwrap(), GridArg { nx: 3, ny: 4, bbox: None });
        let g: GridArg = "2,2,-1,1,-2,2".parse().unwrap();
        assert_eq!(g.bbox, Some([-1.0, 1.0, -2.0, 2.0]));
        assert!("1,5".parse::<GridArg>().is_err());
        assert!("4,4,1,-1,0,1".parse::<GridArg>().is_err());
        assert!("4".parse::<GridArg>().is_err());
    }

    #[test]
    fn csv_values_round_trip_bitwise() {
        let spec = GridSpec { nx: 3, ny: 2, x_min: -0.1, x_max: 1.0 / 3.0, y_min: 0.7, y_max: 2.0f64.sqrt() };
        let grid = FieldGrid::evaluate(spec, |z| z.re > 0.3, |z| Complex64::new(z.re.exp(), -z.im / 7.0));
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let mut r = csv::Reader::from_reader(buf.as_slice());
        for (rec, (z, v)) in r.records().zip(&grid.cells) {
            let rec = rec.unwrap();
            let num = |i: usize| rec[i].parse::<f64>().unwrap();
            assert_eq!((num(0), num(1)), (z.re, z.im));
            match v {
                Some(v) => assert_eq!((num(2), num(3), &rec[4]), (v.re, v.im, "0")),
                None => assert!(num(2).is_nan() && &rec[4] == "1"),
            }
        }
    }
}
