//! Double-double arithmetic (an unevaluated sum `hi + lo` of two `f64`s,
//! about 106 bits of significand).
//!
//! Only what the phase computations need is here: the error-free
//! transformations, field operations, `exp`, `ln` and `sin_cos` on a
//! reduced range. Algorithms follow the QD library of Hida, Li and Bailey.

use std::ops::{Add, Mul, Neg, Sub};

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Requires `|a| >= |b|`.
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const PI: Dd = Dd::new(3.141592653589793, 1.2246467991473532e-16);
pub const TWO_PI: Dd = Dd::new(6.283185307179586, 2.4492935982947064e-16);
pub const HALF_PI: Dd = Dd::new(1.5707963267948966, 6.123233995736766e-17);
pub const PI_8: Dd = Dd::new(0.39269908169872414, 1.5308084989341915e-17);
pub const LN_2PI: Dd = Dd::new(1.8378770664093456, -7.756588316134483e-17);
pub const LN2: Dd = Dd::new(0.6931471805599453, 2.3190468138462996e-17);

/// Third component of 2π, for triple-double argument reduction.
pub const TWO_PI_TAIL: f64 = -5.989539619436679e-33;

impl Dd {
    pub const ZERO: Dd = Dd::new(0.0, 0.0);
    pub const ONE: Dd = Dd::new(1.0, 0.0);

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, self.lo.mul_add(b, e));
        Dd { hi, lo }
    }

    /// Exact scaling by a power of two.
    #[inline]
    pub fn mul_pow2(self, b: f64) -> Self {
        Dd {
            hi: self.hi * b,
            lo: self.lo * b,
        }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Dd::from_f64(b).mul_f64(q1);
        let q2 = r.hi / b;
        let r = r - Dd::from_f64(b).mul_f64(q2);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }

    pub fn div(self, b: Dd) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        // |r| <= ln2/2, then divided by 2^10 before the series.
        let r = (self - LN2.mul_f64(k)).mul_pow2(1.0 / 1024.0);
        // expm1(r) by Taylor series
        let mut term = r;
        let mut s = r;
        let mut n = 2.0;
        loop {
            term = (term * r).div_f64(n);
            s = s + term;
            if term.hi.abs() <= 1e-36 * s.hi.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            n += 1.0;
        }
        // (1 + s)^2 - 1 = 2s + s^2
        for _ in 0..10 {
            s = s.mul_pow2(2.0) + s.sqr();
        }
        let e = s.add_f64(1.0);
        let scale = 2f64.powi(k as i32);
        e.mul_pow2(scale)
    }

    /// Natural logarithm of a positive double-double; one Newton step on `exp`.
    pub fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0);
        let y = Dd::from_f64(self.hi.ln());
        y + (self * (-y).exp()).add_f64(-1.0)
    }

    /// Sine and cosine of an argument with `|x| <= 8`.
    pub fn sin_cos(self) -> (Dd, Dd) {
        debug_assert!(self.hi.abs() <= 8.0);
        let j = (self.hi / HALF_PI.hi).round();
        let r = self - HALF_PI.mul_f64(j);
        let (s, c) = sin_cos_taylor(r);
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

/// `1/n!` as double-double for n < 34, built once.
fn inv_factorials() -> &'static [Dd; 34] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[Dd; 34]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [Dd::ONE; 34];
        for n in 1..34 {
            t[n] = t[n - 1].div_f64(n as f64);
        }
        t
    })
}

/// Taylor series for `|r| <= π/4`; truncated at degree 33 (term < 1e-36).
fn sin_cos_taylor(r: Dd) -> (Dd, Dd) {
    let f = inv_factorials();
    let r2 = r.sqr();
    // sin r = r (1 - r²/3! + r⁴/5! - ...), cos r = 1 - r²/2! + ...
    let mut s = Dd::ZERO;
    let mut k = 33;
    while k >= 3 {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        s = (s * r2) + f[k].mul_f64(sign);
        k -= 2;
    }
    let s = r * ((s * r2) + Dd::ONE);
    let mut c = Dd::ZERO;
    let mut k = 32;
    while k >= 2 {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        c = (c * r2) + f[k].mul_f64(sign);
        k -= 2;
    }
    let c = (c * r2) + Dd::ONE;
    (s, c)
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = self.hi.mul_add(b.lo, self.lo.mul_add(b.hi, e));
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

/// `x mod 2π` folded into `[-π, π]`, for `x` up to about 2^50.
pub fn reduce_two_pi(x: Dd) -> Dd {
    let k = (x.hi / TWO_PI.hi).round();
    if k == 0.0 {
        return x;
    }
    let (q0, f0) = two_prod(k, TWO_PI.hi);
    let (q1, f1) = two_prod(k, TWO_PI.lo);
    let mut r = Dd::from_f64(x.hi - q0);
    r = r.add_f64(x.lo);
    r = r.add_f64(-f0);
    r = r.add_f64(-q1);
    r = r.add_f64(-f1);
    r.add_f64(-k * TWO_PI_TAIL)
}
