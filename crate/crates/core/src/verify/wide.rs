//! Double-double arithmetic with an unbounded binary exponent.
//!
//! A finite non-zero [`WideReal`] is `(hi + lo) · 2^exp` with `1 ≤ |hi| < 2`
//! and `|lo| ≤ ulp(hi)/2`, giving a 106-bit significand. The separate `i64`
//! exponent keeps products of several extreme binary64 values (and ratios
//! such as `σmax/σmin` near `10^630`) representable.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::lane_math::scalar::{getexp, scalef};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
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

type Dd = (f64, f64);

#[inline]
fn dd_add(a: Dd, b: Dd) -> Dd {
    let (s1, s2) = two_sum(a.0, b.0);
    let (t1, t2) = two_sum(a.1, b.1);
    let (s1, s2) = quick_two_sum(s1, s2 + t1);
    quick_two_sum(s1, s2 + t2)
}

#[inline]
fn dd_neg(a: Dd) -> Dd {
    (-a.0, -a.1)
}

#[inline]
fn dd_mul(a: Dd, b: Dd) -> Dd {
    let (p, e) = two_prod(a.0, b.0);
    quick_two_sum(p, e + (a.0 * b.1 + a.1 * b.0))
}

#[inline]
fn dd_div(a: Dd, b: Dd) -> Dd {
    let q1 = a.0 / b.0;
    let r = dd_add(a, dd_neg(dd_mul(b, (q1, 0.0))));
    let q2 = r.0 / b.0;
    let r = dd_add(r, dd_neg(dd_mul(b, (q2, 0.0))));
    let q3 = r.0 / b.0;
    dd_add(quick_two_sum(q1, q2), (q3, 0.0))
}

#[inline]
fn dd_sqrt(a: Dd) -> Dd {
    let x = 1.0 / a.0.sqrt();
    let ax = a.0 * x;
    let d = dd_add(a, dd_neg(two_prod(ax, ax)));
    two_sum(ax, d.0 * (x * 0.5))
}

/// `2^k` for `|k| ≤ 1022`.
#[inline]
fn pow2(k: i64) -> f64 {
    f64::from_bits(((1023 + k) as u64) << 52)
}

/// An extended-range double-double real.
#[derive(Clone, Copy)]
pub struct WideReal {
    hi: f64,
    lo: f64,
    exp: i64,
}

impl WideReal {
    pub const ZERO: WideReal = WideReal { hi: 0.0, lo: 0.0, exp: 0 };
    pub const ONE: WideReal = WideReal { hi: 1.0, lo: 0.0, exp: 0 };
    pub const INFINITY: WideReal = WideReal { hi: f64::INFINITY, lo: 0.0, exp: 0 };
    pub const NAN: WideReal = WideReal { hi: f64::NAN, lo: 0.0, exp: 0 };

    /// Exact conversion.
    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 || !x.is_finite() {
            return WideReal { hi: x, lo: 0.0, exp: 0 };
        }
        let e = getexp(x);
        WideReal { hi: scalef(x, -e), lo: 0.0, exp: e as i64 }
    }

    fn normalize(d: Dd, exp: i64) -> Self {
        let (hi, lo) = quick_two_sum(d.0, d.1);
        if hi == 0.0 {
            return Self::ZERO;
        }
        if !hi.is_finite() {
            return WideReal { hi, lo: 0.0, exp: 0 };
        }
        let k = getexp(hi) as i64;
        let s = pow2(-k);
        WideReal { hi: hi * s, lo: lo * s, exp: exp + k }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan()
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }

    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// `self · 2^n`, exact.
    pub fn scalb(self, n: i64) -> Self {
        if self.is_zero() || !self.is_finite() {
            self
        } else {
            WideReal { exp: self.exp + n, ..self }
        }
    }

    pub fn sqrt(self) -> Self {
        if self.is_nan() || self.hi < 0.0 {
            return Self::NAN;
        }
        if self.is_zero() || self.is_infinite() {
            return self;
        }
        let (mut m, mut e) = ((self.hi, self.lo), self.exp);
        if e.rem_euclid(2) != 0 {
            m = (m.0 * 2.0, m.1 * 2.0);
            e -= 1;
        }
        Self::normalize(dd_sqrt(m), e.div_euclid(2))
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// `self · b + c`, rounded once per double-double operation.
    pub fn fma(self, b: Self, c: Self) -> Self {
        self * b + c
    }

    /// `sqrt(self² + b²)` without intermediate overflow.
    pub fn hypot(self, b: Self) -> Self {
        (self.square() + b.square()).sqrt()
    }

    /// Nearest binary64, rounding twice when the result is subnormal.
    pub fn to_f64(self) -> f64 {
        if self.is_zero() || !self.is_finite() {
            return self.hi;
        }
        if self.exp > 1100 {
            return self.hi * f64::INFINITY;
        }
        if self.exp < -1200 {
            return self.hi * 0.0;
        }
        scalef(self.hi + self.lo, self.exp as f64)
    }

    /// `floor(log2 |self|)`; `None` for zero and non-finite values.
    pub fn exponent(self) -> Option<i64> {
        if self.is_zero() || !self.is_finite() {
            None
        } else if self.hi.abs() == 1.0 && (self.lo * self.hi) < 0.0 {
            Some(self.exp - 1)
        } else {
            Some(self.exp)
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other.partial_cmp(&self) == Some(Ordering::Greater) || self.is_nan() {
            other
        } else {
            self
        }
    }

    fn pow10(k: i64) -> Self {
        let mut base = WideReal::from_f64(10.0);
        let mut acc = Self::ONE;
        let mut n = k.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        if k < 0 {
            Self::ONE / acc
        } else {
            acc
        }
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_scientific(self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_nan() {
            return "NaN".into();
        }
        if self.is_infinite() {
            return if self.hi > 0.0 { "inf".into() } else { "-inf".into() };
        }
        if self.is_zero() {
            return "0".into();
        }
        let neg = self.hi < 0.0;
        let a = self.abs();
        let log2 = a.exp as f64 + a.hi.log2();
        let mut k = (log2 * std::f64::consts::LOG10_2).floor() as i64;
        let ten = WideReal::from_f64(10.0);
        let mut t = a / Self::pow10(k);
        while t >= ten {
            t = t / ten;
            k += 1;
        }
        while t < Self::ONE {
            t = t * ten;
            k -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 2);
        for _ in 0..digits + 2 {
            let mut d = t.to_f64().floor();
            let mut r = t - WideReal::from_f64(d);
            if r.is_sign_negative() {
                d -= 1.0;
                r = r + Self::ONE;
            } else if r >= Self::ONE {
                d += 1.0;
                r = r - Self::ONE;
            }
            ds.push(d.clamp(0.0, 9.0) as u8);
            t = r * ten;
        }
        // round half up on the first dropped digit
        let round_up = ds[digits] >= 5;
        ds.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    k += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::with_capacity(digits + 8);
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if digits > 1 {
            s.push('.');
            s.extend(ds[1..].iter().map(|d| (b'0' + d) as char));
        }
        s.push('e');
        s.push_str(&k.to_string());
        s
    }
}

impl From<f64> for WideReal {
    fn from(x: f64) -> Self {
        WideReal::from_f64(x)
    }
}

impl Neg for WideReal {
    type Output = Self;
    fn neg(self) -> Self {
        WideReal { hi: -self.hi, lo: -self.lo, exp: self.exp }
    }
}

impl Add for WideReal {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let a = self;
        if !a.is_finite() || !b.is_finite() {
            return WideReal { hi: a.hi + b.hi, lo: 0.0, exp: 0 };
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let (a, b) = if a.exp >= b.exp { (a, b) } else { (b, a) };
        let d = a.exp - b.exp;
        if d > 200 {
            return a;
        }
        let s = pow2(-d);
        Self::normalize(dd_add((a.hi, a.lo), (b.hi * s, b.lo * s)), a.exp)
    }
}

impl Sub for WideReal {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for WideReal {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        if self.is_zero() || b.is_zero() || !self.is_finite() || !b.is_finite() {
            return WideReal { hi: self.hi * b.hi, lo: 0.0, exp: 0 };
        }
        Self::normalize(dd_mul((self.hi, self.lo), (b.hi, b.lo)), self.exp + b.exp)
    }
}

impl Div for WideReal {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        if self.is_zero() || b.is_zero() || !self.is_finite() || !b.is_finite() {
            return WideReal { hi: self.hi / b.hi, lo: 0.0, exp: 0 };
        }
        Self::normalize(dd_div((self.hi, self.lo), (b.hi, b.lo)), self.exp - b.exp)
    }
}

impl PartialEq for WideReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for WideReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.is_nan() || other.is_nan() {
            return None;
        }
        if !self.is_finite() || !other.is_finite() || self.is_zero() || other.is_zero() {
            return self.hi.partial_cmp(&other.hi);
        }
        let d = *self - *other;
        if d.is_zero() {
            Some(Ordering::Equal)
        } else if d.hi < 0.0 {
            Some(Ordering::Less)
        } else {
            Some(Ordering::Greater)
        }
    }
}

impl fmt::Debug for WideReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_scientific(32))
    }
}

/// Scientific notation; the precision is the number of significant digits
/// (default 21).
impl fmt::Display for WideReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_scientific(f.precision().unwrap_or(21)))
    }
}

/// A complex number with [`WideReal`] parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WideComplex {
    pub re: WideReal,
    pub im: WideReal,
}

impl WideComplex {
    pub const ZERO: WideComplex = WideComplex { re: WideReal::ZERO, im: WideReal::ZERO };
    pub const ONE: WideComplex = WideComplex { re: WideReal::ONE, im: WideReal::ZERO };

    pub fn new(re: WideReal, im: WideReal) -> Self {
        WideComplex { re, im }
    }

    pub fn conj(self) -> Self {
        WideComplex { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> WideReal {
        self.re.square() + self.im.square()
    }

    pub fn abs(self) -> WideReal {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, c: WideReal) -> Self {
        WideComplex { re: self.re * c, im: self.im * c }
    }

    pub fn scalb(self, n: i64) -> Self {
        WideComplex { re: self.re.scalb(n), im: self.im.scalb(n) }
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl From<Complex64> for WideComplex {
    fn from(z: Complex64) -> Self {
        WideComplex { re: z.re.into(), im: z.im.into() }
    }
}

impl From<f64> for WideComplex {
    fn from(x: f64) -> Self {
        WideComplex { re: x.into(), im: WideReal::ZERO }
    }
}

impl Add for WideComplex {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        WideComplex { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for WideComplex {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        WideComplex { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Neg for WideComplex {
    type Output = Self;
    fn neg(self) -> Self {
        WideComplex { re: -self.re, im: -self.im }
    }
}

impl Mul for WideComplex {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        WideComplex { re: self.re * b.re - self.im * b.im, im: self.re * b.im + self.im * b.re }
    }
}
