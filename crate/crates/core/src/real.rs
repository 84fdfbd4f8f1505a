//! Floating-point abstraction shared by the analytic code.
//!
//! Everything transcendental (periods, heights, L-series) is generic over
//! [`Real`], implemented for `f64` and for [`DoubleDouble`](crate::dd::DoubleDouble).

use alloc::format;
use alloc::string::String;
use core::fmt::Debug;
use core::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Working precision selected at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    /// Significant decimal digits carried by reports in this mode.
    pub fn digits(self) -> usize {
        match self {
            Precision::Double => 12,
            Precision::Extended => 30,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" | "f64" => Some(Precision::Double),
            "extended" | "dd" => Some(Precision::Extended),
            _ => None,
        }
    }
}

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// The mode this type implements.
    const PRECISION: Precision;
    /// Relative spacing of representable numbers near one.
    fn epsilon() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn round(self) -> Self;
    fn floor(self) -> Self;
    fn pi() -> Self;
    fn euler_gamma() -> Self;
    /// Scientific notation with `digits` significant digits, e.g. `1.25e-3`.
    fn to_sci_string(self, digits: usize) -> String;

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn from_bigint(n: &BigInt) -> Self {
        Self::from_f64(n.to_f64().unwrap_or(f64::NAN))
    }

    fn from_ratio(q: &BigRational) -> Self {
        Self::from_bigint(q.numer()) / Self::from_bigint(q.denom())
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Double;
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn ln(self) -> Self {
        libm::log(self)
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn round(self) -> Self {
        libm::round(self)
    }
    fn floor(self) -> Self {
        libm::floor(self)
    }
    fn pi() -> Self {
        core::f64::consts::PI
    }
    fn euler_gamma() -> Self {
        0.577_215_664_901_532_9
    }
    fn to_sci_string(self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
    fn abs(self) -> Self {
        libm::fabs(self)
    }
}

/// Natural log of a positive big integer, safe beyond the `f64` range.
pub fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return libm::log(libm::fabs(n.to_f64().unwrap_or(f64::NAN)));
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    libm::log(libm::fabs(top.to_f64().unwrap_or(f64::NAN))) + shift as f64 * core::f64::consts::LN_2
}

/// `ln max(|num|, den)`: the logarithmic naive height of a rational.
pub fn ln_height(q: &BigRational) -> f64 {
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    let m = if num > den { num } else { den };
    if m.bits() == 0 {
        return 0.0;
    }
    ln_bigint(&BigInt::from(m.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_of_huge_integers() {
        let n = BigInt::from(3u32).pow(2000);
        let want = 2000.0 * libm::log(3.0);
        assert!((ln_bigint(&n) - want).abs() < 1e-9 * want);
        assert!((ln_bigint(&BigInt::from(37)) - libm::log(37.0)).abs() < 1e-15);
    }

    #[test]
    fn sci_formatting() {
        assert_eq!(1.2692093042795534f64.to_sci_string(12), "1.26920930428e0");
        assert_eq!((-0.00025f64).to_sci_string(3), "-2.50e-4");
    }
}
