//! Double-double arithmetic, enough for the alternating ascending series
//! whose partial sums cancel by up to `e^t`.

use std::ops::{Add, Mul};

use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
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
    pub fn new(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    fn norm(s: f64, e: f64) -> Self {
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }

    pub fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Self) -> Self {
        self + o.neg()
    }

    pub fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self.sub(b * Dd::new(q1));
        let q2 = r.hi / b.hi;
        let r = r.sub(b * Dd::new(q2));
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::new(q3)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::norm(s, e + f)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::norm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn new(re: Dd, im: Dd) -> Self {
        Self { re, im }
    }

    pub fn one() -> Self {
        Self::new(Dd::new(1.0), Dd::new(0.0))
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }

    pub fn mul(self, o: Self) -> Self {
        Self::new(
            (self.re * o.re).sub(self.im * o.im),
            self.re * o.im + self.im * o.re,
        )
    }

    /// `s / self`
    pub fn recip_scaled(self, s: Dd) -> Self {
        let den = self.re * self.re + self.im * self.im;
        let f = s.div(den);
        Self::new(self.re * f, (self.im * f).neg())
    }

    pub fn abs_approx(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }
}
