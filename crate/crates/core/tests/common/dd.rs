//! Minimal double-double arithmetic (about 32 significant digits), used only
//! as an extended-precision reference in tests.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
    pub fn powi(self, n: u32) -> Self {
        let mut out = Dd::from_f64(1.0);
        for _ in 0..n {
            out = out * self;
        }
        out
    }
    /// exp by halving reduction and Taylor series.
    pub fn exp(self) -> Self {
        let k = 20;
        let r = self * Dd::from_f64(1.0 / (1u64 << k) as f64);
        let mut term = Dd::from_f64(1.0);
        let mut sum = Dd::from_f64(1.0);
        for i in 1..30 {
            term = term * r / Dd::from_f64(i as f64);
            sum = sum + term;
        }
        for _ in 0..k {
            sum = sum * sum;
        }
        sum
    }
    /// Natural log by Newton iteration on exp.
    pub fn ln(self) -> Self {
        let mut y = Dd::from_f64(self.to_f64().ln());
        for _ in 0..3 {
            y = y + self * (-y).exp() - Dd::from_f64(1.0);
        }
        y
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

pub const PI: Dd = Dd::new(std::f64::consts::PI, 1.2246467991473532e-16);
pub const EULER_GAMMA: Dd = Dd::new(0.5772156649015329, -4.942915152430645e-18);
