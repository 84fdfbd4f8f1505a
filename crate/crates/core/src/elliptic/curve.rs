use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::point::RationalPoint;
use crate::primes::{factor, val};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("singular Weierstrass equation (discriminant 0)")]
    Singular,
    #[error("coordinate change does not give an integral model")]
    NotIntegral,
}

/// Integral Weierstrass model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurveQ {
    a: [BigInt; 5],
    b2: BigInt,
    b4: BigInt,
    b6: BigInt,
    b8: BigInt,
    c4: BigInt,
    c6: BigInt,
    disc: BigInt,
    label: Option<String>,
}

impl EllipticCurveQ {
    pub fn new(a: [BigInt; 5]) -> Result<Self, CurveError> {
        let [a1, a2, a3, a4, a6] = &a;
        let b2: BigInt = a1 * a1 + 4 * a2;
        let b4: BigInt = 2 * a4 + a1 * a3;
        let b6: BigInt = a3 * a3 + 4 * a6;
        let b8: BigInt = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let c4: BigInt = &b2 * &b2 - 24 * &b4;
        let c6: BigInt = 36 * &b2 * &b4 - &b2 * &b2 * &b2 - 216 * &b6;
        let disc: BigInt = -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
        assert_eq!(BigInt::from(4) * &b8, &b2 * &b6 - &b4 * &b4);
        assert_eq!(BigInt::from(1728) * &disc, &c4 * &c4 * &c4 - &c6 * &c6);
        if disc.is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(EllipticCurveQ { a, b2, b4, b6, b8, c4, c6, disc, label: None })
    }

    pub fn from_i64(a: [i64; 5]) -> Result<Self, CurveError> {
        Self::new(a.map(BigInt::from))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn a_invariants(&self) -> &[BigInt; 5] {
        &self.a
    }
    pub fn a1(&self) -> &BigInt {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigInt {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigInt {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigInt {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigInt {
        &self.a[4]
    }
    pub fn b2(&self) -> &BigInt {
        &self.b2
    }
    pub fn b4(&self) -> &BigInt {
        &self.b4
    }
    pub fn b6(&self) -> &BigInt {
        &self.b6
    }
    pub fn b8(&self) -> &BigInt {
        &self.b8
    }
    pub fn c4(&self) -> &BigInt {
        &self.c4
    }
    pub fn c6(&self) -> &BigInt {
        &self.c6
    }
    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn j_invariant(&self) -> BigRational {
        BigRational::new(&self.c4 * &self.c4 * &self.c4, self.disc.clone())
    }

    /// Applies `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t` and returns the
    /// model in the primed coordinates, which must be integral.
    pub fn transform(&self, iso: &Isomorphism) -> Result<EllipticCurveQ, CurveError> {
        let a = iso.apply_to_coefficients(&self.a);
        let mut out: Vec<BigInt> = Vec::with_capacity(5);
        for q in a {
            if !q.is_integer() {
                return Err(CurveError::NotIntegral);
            }
            out.push(q.to_integer());
        }
        let arr: [BigInt; 5] = [0, 1, 2, 3, 4].map(|i| out[i].clone());
        let mut e = EllipticCurveQ::new(arr)?;
        e.label = self.label.clone();
        Ok(e)
    }

    /// Exact membership test; the point at infinity is always on the curve.
    pub fn contains(&self, p: &RationalPoint) -> bool {
        match p {
            RationalPoint::Infinity => true,
            RationalPoint::Affine { x, y } => {
                let [a1, a2, a3, a4, a6] = self.a_rational();
                let lhs = y * y + &a1 * x * y + &a3 * y;
                let rhs = x * x * x + &a2 * x * x + &a4 * x + a6;
                lhs == rhs
            }
        }
    }

    pub(crate) fn a_rational(&self) -> [BigRational; 5] {
        self.a.clone().map(BigRational::from_integer)
    }

    /// `y`-values of `x` in order `(y, -y - a1 x - a3)`, if `x` is the
    /// abscissa of a rational point.
    pub fn lift_x(&self, x: &BigRational) -> Option<(BigRational, BigRational)> {
        let [a1, _, a3, _, _] = self.a_rational();
        // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
        let b2 = BigRational::from_integer(self.b2.clone());
        let b4 = BigRational::from_integer(self.b4.clone());
        let b6 = BigRational::from_integer(self.b6.clone());
        let rhs = BigRational::from_integer(4.into()) * x * x * x
            + b2 * x * x
            + BigRational::from_integer(2.into()) * b4 * x
            + b6;
        if rhs.is_negative() {
            return None;
        }
        let n = crate::primes::exact_sqrt(rhs.numer())?;
        let d = crate::primes::exact_sqrt(rhs.denom())?;
        let w = BigRational::new(n, d);
        let two = BigRational::from_integer(2.into());
        let base = -(&a1 * x) - a3;
        let y1 = (&base + &w) / &two;
        let y2 = (base - w) / two;
        Some((y1, y2))
    }
}

impl fmt::Display for EllipticCurveQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        write!(f, "[{a1},{a2},{a3},{a4},{a6}]")
    }
}

/// Change of Weierstrass coordinates `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub u: BigRational,
    pub r: BigRational,
    pub s: BigRational,
    pub t: BigRational,
}

impl Isomorphism {
    pub fn identity() -> Self {
        Isomorphism::new(BigRational::one(), BigRational::zero(), BigRational::zero(), BigRational::zero())
    }

    pub fn new(u: BigRational, r: BigRational, s: BigRational, t: BigRational) -> Self {
        assert!(!u.is_zero());
        Isomorphism { u, r, s, t }
    }

    pub fn from_ints(u: i64, r: i64, s: i64, t: i64) -> Self {
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        Isomorphism::new(q(u), q(r), q(s), q(t))
    }

    pub fn apply_to_coefficients(&self, a: &[BigInt; 5]) -> [BigRational; 5] {
        let [a1, a2, a3, a4, a6] = a.clone().map(BigRational::from_integer);
        let (u, r, s, t) = (&self.u, &self.r, &self.s, &self.t);
        let two = BigRational::from_integer(2.into());
        let three = BigRational::from_integer(3.into());
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        let na1 = (&a1 + &two * s) / u;
        let na2 = (&a2 - s * &a1 + &three * r - s * s) / &u2;
        let na3 = (&a3 + r * &a1 + &two * t) / &u3;
        let na4 = (&a4 - s * &a3 + &two * r * &a2 - (t + r * s) * &a1 + &three * r * r - &two * s * t) / &u4;
        let na6 = (&a6 + r * &a4 + r * r * &a2 + r * r * r - t * &a3 - t * t - r * t * &a1) / &u6;
        [na1, na2, na3, na4, na6]
    }

    /// Point on the source model to the target model.
    pub fn map_point(&self, p: &RationalPoint) -> RationalPoint {
        match p {
            RationalPoint::Infinity => RationalPoint::Infinity,
            RationalPoint::Affine { x, y } => {
                let u2 = &self.u * &self.u;
                let u3 = &u2 * &self.u;
                let xp = (x - &self.r) / &u2;
                let yp = (y - &self.s * (x - &self.r) - &self.t) / u3;
                RationalPoint::Affine { x: xp, y: yp }
            }
        }
    }

    /// Point on the target model back to the source model.
    pub fn unmap_point(&self, p: &RationalPoint) -> RationalPoint {
        match p {
            RationalPoint::Infinity => RationalPoint::Infinity,
            RationalPoint::Affine { x, y } => {
                let u2 = &self.u * &self.u;
                let u3 = &u2 * &self.u;
                let xs = &u2 * x + &self.r;
                let ys = u3 * y + &self.s * &u2 * x + &self.t;
                RationalPoint::Affine { x: xs, y: ys }
            }
        }
    }

    /// The isomorphism between two models with the same `j`, given the scale
    /// `u` relating them (`a1' u = a1 + 2s` and so on).
    fn between(src: &EllipticCurveQ, dst: &EllipticCurveQ, u: BigRational) -> Self {
        let [a1, a2, a3, _, _] = src.a_rational();
        let [b1, b2, b3, _, _] = dst.a_rational();
        let two = BigRational::from_integer(2.into());
        let three = BigRational::from_integer(3.into());
        let s = (&u * &b1 - &a1) / &two;
        let r = (&u * &u * &b2 - &a2 + &s * &a1 + &s * &s) / three;
        let t = (&u * &u * &u * &b3 - &a3 - &r * &a1) / two;
        Isomorphism::new(u, r, s, t)
    }
}

/// Integral model with given `c4, c6`, reduced so that `a1, a3 in {0,1}` and
/// `a2 in {-1,0,1}`, or `None` if no such model exists.
fn model_from_c4c6(c4: &BigInt, c6: &BigInt) -> Option<[BigInt; 5]> {
    let twelve = BigInt::from(12);
    let mut b2 = (-c6).mod_floor(&twelve);
    if b2 > BigInt::from(6) {
        b2 -= &twelve;
    }
    let num4: BigInt = &b2 * &b2 - c4;
    if !(&num4 % 24u32).is_zero() {
        return None;
    }
    let b4: BigInt = num4 / 24u32;
    let num6: BigInt = 36 * &b2 * &b4 - &b2 * &b2 * &b2 - c6;
    if !(&num6 % 216u32).is_zero() {
        return None;
    }
    let b6: BigInt = num6 / 216u32;
    let two = BigInt::from(2);
    let a1 = b2.mod_floor(&two);
    let a3 = b6.mod_floor(&two);
    let n2 = &b2 - &a1;
    let n4 = &b4 - &a1 * &a3;
    let n6 = &b6 - &a3;
    if !(&n2 % 4u32).is_zero() || !(&n4 % 2u32).is_zero() || !(&n6 % 4u32).is_zero() {
        return None;
    }
    Some([a1, n2 / 4, a3, n4 / 2, n6 / 4])
}

/// Global minimal model in reduced form, plus the coordinate change from `e`.
pub fn minimal_model_with_isomorphism(e: &EllipticCurveQ) -> (EllipticCurveQ, Isomorphism) {
    let mut u_big = BigInt::one();
    let mut k23: Vec<(BigInt, u32)> = Vec::new();
    for (p, _) in factor(e.discriminant()) {
        let p = BigInt::from(p);
        let vd = val(e.discriminant(), &p);
        let v4 = val(e.c4(), &p);
        let v6 = val(e.c6(), &p);
        let kmax = (vd / 12).min(v4 / 4).min(v6 / 6);
        if kmax == 0 {
            continue;
        }
        if p == BigInt::from(2) || p == BigInt::from(3) {
            k23.push((p, kmax));
        } else {
            u_big *= p.pow(kmax);
        }
    }
    // For 2 and 3 the largest admissible scaling depends on congruences;
    // try exponents downward. The two primes do not interact.
    let choices =
        |i: usize| -> Vec<u32> { k23.get(i).map(|(_, k)| (0..=*k).rev().collect()).unwrap_or_else(|| alloc::vec![0]) };
    let mut best = None;
    'outer: for k0 in choices(0) {
        for k1 in choices(1) {
            let mut u = u_big.clone();
            if let Some((p, _)) = k23.first() {
                u *= p.pow(k0);
            }
            if let Some((p, _)) = k23.get(1) {
                u *= p.pow(k1);
            }
            let u4 = u.pow(4);
            let u6 = u.pow(6);
            let c4 = e.c4() / &u4;
            let c6 = e.c6() / &u6;
            if let Some(a) = model_from_c4c6(&c4, &c6) {
                best = Some((a, u));
                break 'outer;
            }
        }
    }
    let (a, u) = best.expect("every integral model has an integral minimal model");
    let mut min = EllipticCurveQ::new(a).expect("scaling preserves nonsingularity");
    min.label = e.label.clone();
    let iso = Isomorphism::between(e, &min, BigRational::from_integer(u));
    debug_assert_eq!(e.transform(&iso).as_ref(), Ok(&min));
    (min, iso)
}

pub fn minimal_model(e: &EllipticCurveQ) -> EllipticCurveQ {
    minimal_model_with_isomorphism(e).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_of_11a1() {
        let e = EllipticCurveQ::from_i64([0, -1, 1, -10, -20]).unwrap();
        assert_eq!(e.discriminant(), &BigInt::from(-161051));
        assert_eq!(e.c4(), &BigInt::from(496));
        assert_eq!(e.c6(), &BigInt::from(20008));
        assert_eq!(e.j_invariant(), BigRational::new((-122023936).into(), 161051.into()));
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(EllipticCurveQ::from_i64([0, 0, 0, 0, 0]), Err(CurveError::Singular));
        assert_eq!(EllipticCurveQ::from_i64([0, 0, 0, -3, 2]), Err(CurveError::Singular));
    }

    #[test]
    fn minimal_models() {
        let e37 = EllipticCurveQ::from_i64([0, 0, 1, -1, 0]).unwrap();
        assert_eq!(minimal_model(&e37), e37);
        let e = EllipticCurveQ::from_i64([0, 0, 0, -64, 0]).unwrap();
        let m = minimal_model(&e);
        assert_eq!(m, EllipticCurveQ::from_i64([0, 0, 0, -4, 0]).unwrap());
        assert_eq!(e.discriminant(), &(m.discriminant() * BigInt::from(4096)));
        assert_eq!(minimal_model(&m), m);
    }

    #[test]
    fn minimal_model_undoes_scaling() {
        let base = EllipticCurveQ::from_i64([1, -1, 1, -1, -14]).unwrap(); // 17a1
        for (u, r, s, t) in [(6, 5, -3, 7), (2, 1, 1, 1), (3, 0, 0, 0), (35, -4, 2, 11)] {
            // scale up: the inverse of a transformation with parameter 1/u
            let iso = Isomorphism::from_ints(u, r, s, t);
            let inv_a = {
                let q = |v: i64| BigRational::from_integer(v.into());
                let uinv = q(1) / q(u);
                // inverse of (u, r, s, t) is (1/u, -r/u^2, -s/u, (rs - t)/u^3)
                Isomorphism::new(
                    uinv.clone(),
                    -q(r) / (q(u) * q(u)),
                    -q(s) / q(u),
                    (q(r) * q(s) - q(t)) / (q(u) * q(u) * q(u)),
                )
            };
            let big = base.transform(&inv_a).unwrap();
            assert_eq!(big.transform(&iso).unwrap(), base);
            let (m, to_min) = minimal_model_with_isomorphism(&big);
            assert_eq!(m, base);
            let p = RationalPoint::from_ints(5, -11); // not nec. on curve; mapping is formal
            assert_eq!(to_min.unmap_point(&to_min.map_point(&p)), p);
        }
    }
}
