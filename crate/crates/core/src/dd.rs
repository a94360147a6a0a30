//! Double-double arithmetic, just enough to evaluate `sin(t^{-7/4})` when the
//! phase is far beyond `2^53`.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`, giving
//! roughly 106 bits of significand.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;

/// 2π split into three non-overlapping doubles.
const TWO_PI: [f64; 3] = [
    6.283_185_307_179_586,
    2.449_293_598_294_706_4e-16,
    -5.989_539_619_436_679e-33,
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact conversion for rationals whose denominator is a power of two and
    /// whose numerator fits in 106 bits. Other rationals are rounded.
    pub fn from_ratio(r: &Ratio<i128>) -> Self {
        let n = *r.numer();
        let d = *r.denom();
        if d > 0 && (d & (d - 1)) == 0 {
            let hi = n as f64;
            let rem = n - hi as i128;
            let lo = rem as f64;
            let scale = 1.0 / d as f64;
            Self::new(hi * scale, lo * scale)
        } else {
            let hi = n as f64 / d as f64;
            Self::from_f64(hi)
        }
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_positive(self) -> bool {
        self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0)
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * s);
        Self::new(s, r)
    }

    pub fn recip(self) -> Self {
        Self::from_f64(1.0) / self
    }

    /// `self^{-7/4}` for positive `self`, as `1 / (t·√t·⁴√t)`.
    pub fn pow_neg_seven_quarters(self) -> Self {
        let r2 = self.sqrt();
        let r4 = r2.sqrt();
        (self * r2 * r4).recip()
    }

    /// Reduces modulo 2π into roughly `[-π, π]`.
    pub fn rem_two_pi(self) -> f64 {
        let mut r = self;
        for _ in 0..3 {
            let k = (r.hi / TWO_PI[0]).round();
            if k == 0.0 {
                break;
            }
            let (p1, e1) = two_prod(k, TWO_PI[0]);
            let (p2, e2) = two_prod(k, TWO_PI[1]);
            let p3 = k * TWO_PI[2];
            r = r - DoubleDouble::new(p1, e1);
            r = r - DoubleDouble::new(p2, e2);
            r = r - DoubleDouble::from_f64(p3);
        }
        r.to_f64()
    }

    pub fn sin_cos(self) -> (f64, f64) {
        if self.hi.abs() < 1e8 && self.lo == 0.0 {
            return self.hi.sin_cos();
        }
        self.rem_two_pi().sin_cos()
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * DoubleDouble::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DoubleDouble::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        d.hi.partial_cmp(&0.0).map(|o| {
            if o == Ordering::Equal {
                d.lo.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
            } else {
                o
            }
        })
    }
}
