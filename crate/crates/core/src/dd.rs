//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s,
//! good for roughly 32 significant digits.
//!
//! Algorithms follow the usual error-free transformations (Dekker, Knuth)
//! as in the QD library. No FMA is assumed.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::num::ParseFloatError;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

use crate::real::{Precision, Real};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const PI: DoubleDouble = DoubleDouble::new(core::f64::consts::PI, 1.2246467991473532e-16);
const TWO_PI: DoubleDouble = DoubleDouble::new(core::f64::consts::TAU, 2.4492935982947064e-16);
const HALF_PI: DoubleDouble = DoubleDouble::new(core::f64::consts::FRAC_PI_2, 6.123233995736766e-17);
const LN2: DoubleDouble = DoubleDouble::new(core::f64::consts::LN_2, 2.3190468138462996e-17);
const EULER: DoubleDouble = DoubleDouble::new(0.5772156649015329, -4.942915152430645e-18);
const EPS: f64 = 4.93038065763132e-32; // 2^-104

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
fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        DoubleDouble::new(h, l)
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        Self::renorm(p1, p2 + self.lo * b)
    }

    fn ldexp(self, k: i32) -> Self {
        DoubleDouble::new(libm::scalbn(self.hi, k), libm::scalbn(self.lo, k))
    }

    fn sqr(self) -> Self {
        self * self
    }

    fn is_zero_(self) -> bool {
        self.hi == 0.0
    }

    // Taylor series around zero, |x| <= pi/4.
    fn sin_taylor(x: Self) -> Self {
        if x.is_zero_() {
            return x;
        }
        let x2 = -x.sqr();
        let mut term = x;
        let mut sum = x;
        let mut k = 1.0;
        loop {
            term = term * x2 / DoubleDouble::from((k + 1.0) * (k + 2.0));
            k += 2.0;
            sum += term;
            if libm::fabs(term.hi) <= EPS * libm::fabs(sum.hi) {
                break;
            }
        }
        sum
    }

    fn cos_taylor(x: Self) -> Self {
        let x2 = -x.sqr();
        let mut term = DoubleDouble::one();
        let mut sum = term;
        let mut k = 0.0;
        loop {
            term = term * x2 / DoubleDouble::from((k + 1.0) * (k + 2.0));
            k += 2.0;
            sum += term;
            if libm::fabs(term.hi) <= EPS * libm::fabs(sum.hi) {
                break;
            }
        }
        sum
    }

    /// Reduces `a` to `t + j*pi/2`, `|t| <= pi/4`, returning `(t, j mod 4)`.
    fn reduce_quadrant(a: Self) -> (Self, i64) {
        let z = a - TWO_PI * (a / TWO_PI).round();
        let j = (z / HALF_PI).round();
        let t = z - HALF_PI * j;
        (t, (j.hi as i64).rem_euclid(4))
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::new(x, 0.0)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Self::renorm(s1, s2 + t2)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble::new(-self.hi, -self.lo)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        Self::renorm(p1, p2 + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return DoubleDouble::from(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble::new(q1, q2) + DoubleDouble::from(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let t = if q < DoubleDouble::zero() { -((-q).floor()) } else { q.floor() };
        self - t * b
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for DoubleDouble {
            fn $m(&mut self, b: Self) { *self = *self $op b; }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.is_zero_()
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::new(1.0, 0.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, ParseFloatError> {
        match DoubleDouble::parse_decimal(s) {
            Some(x) => Ok(x),
            None => s.parse::<f64>().map(DoubleDouble::from),
        }
    }
}

impl DoubleDouble {
    /// Decimal string such as `-1.25e-3` to full double-double accuracy.
    pub fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
            None => (s, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        let digits: String = [int, frac].concat();
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        // keep 40 significant digits; the rest cannot matter
        let trimmed = digits.trim_start_matches('0');
        let keep = trimmed.len().min(40);
        let dropped = (trimmed.len() - keep) as i32;
        let m: BigInt = if keep == 0 { BigInt::zero() } else { trimmed[..keep].parse().ok()? };
        let mut x = <DoubleDouble as Real>::from_bigint(&m);
        let e10 = exp - frac.len() as i32 + dropped;
        let ten = DoubleDouble::from(10.0);
        let scale = <DoubleDouble as Real>::powi(ten, e10.abs());
        x = if e10 >= 0 { x * scale } else { x / scale };
        Some(if neg { -x } else { x })
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(f.precision().unwrap_or(32)))
    }
}

impl Real for DoubleDouble {
    const PRECISION: Precision = Precision::Extended;
    fn epsilon() -> Self {
        DoubleDouble::from(EPS)
    }

    fn from_f64(x: f64) -> Self {
        DoubleDouble::from(x)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Self::renorm(hi, lo)
    }

    fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DoubleDouble::from(hi);
        }
        let rest = n - BigInt::from_f64(hi).unwrap_or_default();
        Self::renorm(hi, rest.to_f64().unwrap_or(0.0))
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from(libm::sqrt(self.hi));
        }
        let x = 1.0 / libm::sqrt(self.hi);
        let ax = self.hi * x;
        let ax_dd = DoubleDouble::from(ax);
        ax_dd + DoubleDouble::from((self - ax_dd.sqr()).hi * (x * 0.5))
    }

    fn exp(self) -> Self {
        if self.hi > 709.7 {
            return DoubleDouble::from(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::zero();
        }
        let k = libm::round(self.hi / LN2.hi);
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        // expm1 of the reduced argument, then undo the scaling by squaring.
        let mut term = r;
        let mut s = r;
        let mut n = 1.0;
        while libm::fabs(term.hi) > EPS * libm::fabs(s.hi).max(1e-300) {
            n += 1.0;
            term = term * r / DoubleDouble::from(n);
            s += term;
        }
        for _ in 0..10 {
            s = s.ldexp(1) + s.sqr();
        }
        (s + DoubleDouble::one()).ldexp(k as i32)
    }

    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from(libm::log(self.hi));
        }
        let mut x = DoubleDouble::from(libm::log(self.hi));
        for _ in 0..2 {
            x = x + self * (-x).exp() - DoubleDouble::one();
        }
        x
    }

    fn sin(self) -> Self {
        let (t, j) = Self::reduce_quadrant(self);
        match j {
            0 => Self::sin_taylor(t),
            1 => Self::cos_taylor(t),
            2 => -Self::sin_taylor(t),
            _ => -Self::cos_taylor(t),
        }
    }

    fn cos(self) -> Self {
        let (t, j) = Self::reduce_quadrant(self);
        match j {
            0 => Self::cos_taylor(t),
            1 => -Self::sin_taylor(t),
            2 => -Self::cos_taylor(t),
            _ => Self::sin_taylor(t),
        }
    }

    fn round(self) -> Self {
        let h = libm::round(self.hi);
        if h == self.hi {
            return Self::renorm(h, libm::round(self.lo));
        }
        let mut h = h;
        if libm::fabs(h - self.hi) == 0.5 {
            // tie on hi alone; lo decides
            if self.lo < 0.0 && h > self.hi {
                h -= 1.0;
            } else if self.lo > 0.0 && h < self.hi {
                h += 1.0;
            }
        }
        DoubleDouble::from(h)
    }

    fn floor(self) -> Self {
        let h = libm::floor(self.hi);
        if h == self.hi {
            Self::renorm(h, libm::floor(self.lo))
        } else {
            DoubleDouble::from(h)
        }
    }

    fn pi() -> Self {
        PI
    }

    fn euler_gamma() -> Self {
        EULER
    }

    fn to_sci_string(self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.hi == 0.0 {
            return self.hi.to_sci_string(digits);
        }
        if !self.hi.is_finite() {
            return alloc::format!("{}", self.hi);
        }
        let neg = self.hi < 0.0;
        let mut y = self.abs();
        let mut e = libm::floor(libm::log10(y.hi)) as i32;
        let ten = DoubleDouble::from(10.0);
        y /= ten.powi(e);
        if y.hi >= 10.0 {
            y /= ten;
            e += 1;
        } else if y.hi < 1.0 {
            y *= ten;
            e -= 1;
        }
        let mut ds: alloc::vec::Vec<u8> = alloc::vec::Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = libm::floor(y.hi).clamp(0.0, 9.0);
            ds.push(d as u8);
            y = (y - DoubleDouble::from(d)) * ten;
            if y.hi < 0.0 {
                y = DoubleDouble::zero();
            }
        }
        let roundup = ds.pop().unwrap_or(0) >= 5;
        if roundup {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    e += 1;
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
        if ds.len() > 1 {
            s.push('.');
            for &d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push_str(&alloc::format!("e{}", e));
        s
    }
}
