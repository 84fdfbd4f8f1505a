//! Tate's algorithm over Z_p.

use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::curve::EllipticCurveQ;
use crate::primes::val;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => f.write_str("I0"),
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => f.write_str("II"),
            Kodaira::III => f.write_str("III"),
            Kodaira::IV => f.write_str("IV"),
            Kodaira::I0Star => f.write_str("I0*"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => f.write_str("IV*"),
            Kodaira::IIIStar => f.write_str("III*"),
            Kodaira::IIStar => f.write_str("II*"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl Reduction {
    /// Trace of Frobenius at a bad prime: `+1`, `-1` or `0`.
    pub fn bad_ap(self) -> i64 {
        match self {
            Reduction::SplitMultiplicative => 1,
            Reduction::NonsplitMultiplicative => -1,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub p: BigUint,
    pub f_p: u32,
    pub c_p: u32,
    pub kodaira: Kodaira,
    pub reduction: Reduction,
    /// Valuation of the minimal discriminant.
    pub disc_valuation: u32,
}

struct Fp<'a> {
    p: &'a BigInt,
}

impl Fp<'_> {
    fn red(&self, x: &BigInt) -> BigInt {
        x.mod_floor(self.p)
    }
    fn divides(&self, x: &BigInt) -> bool {
        (x % self.p).is_zero()
    }
    fn inv(&self, x: &BigInt) -> BigInt {
        let a = self.red(x);
        let e = a.extended_gcd(self.p);
        assert!(e.gcd.is_one(), "not invertible mod p");
        e.x.mod_floor(self.p)
    }
    fn is_square(&self, x: &BigInt) -> bool {
        let a = self.red(x);
        if a.is_zero() || self.p == &BigInt::from(2) {
            return true;
        }
        let e = (self.p - 1u32) / 2u32;
        a.modpow(&e, self.p).is_one()
    }
    /// Does `a x^2 + b x + c` have a root mod p?
    fn quad_roots(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
        let (a, b, c) = (self.red(a), self.red(b), self.red(c));
        if a.is_zero() {
            return !b.is_zero() || c.is_zero();
        }
        if self.p == &BigInt::from(2) {
            // x = 0 or x = 1
            return c.is_zero() || ((&a + &b + &c) % 2u32).is_zero();
        }
        self.is_square(&(&b * &b - 4u32 * &a * &c))
    }
    /// Number of distinct roots of `x^3 + b x^2 + c x + d` mod p.
    fn cubic_roots(&self, b: &BigInt, c: &BigInt, d: &BigInt) -> u32 {
        let f = [self.red(d), self.red(c), self.red(b), BigInt::one()];
        // deg gcd(x^p - x, f)
        let xp = self.pow_x_mod(&f);
        let mut g = [xp[0].clone(), self.red(&(&xp[1] - 1u32)), xp[2].clone()];
        for v in g.iter_mut() {
            *v = self.red(v);
        }
        self.gcd_degree(&f, &g)
    }
    // x^p mod the monic cubic f, as coefficients [c0, c1, c2]
    fn pow_x_mod(&self, f: &[BigInt; 4]) -> [BigInt; 3] {
        let mul = |u: &[BigInt; 3], v: &[BigInt; 3]| -> [BigInt; 3] {
            let mut prod = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
            for i in 0..3 {
                for j in 0..3 {
                    prod[i + j] += &u[i] * &v[j];
                }
            }
            for k in (3..5).rev() {
                let lead = prod[k].clone();
                if !lead.is_zero() {
                    for i in 0..3 {
                        prod[k - 3 + i] -= &lead * &f[i];
                    }
                    prod[k] = BigInt::zero();
                }
            }
            [self.red(&prod[0]), self.red(&prod[1]), self.red(&prod[2])]
        };
        let mut result = [BigInt::one(), BigInt::zero(), BigInt::zero()];
        let mut base = [BigInt::zero(), BigInt::one(), BigInt::zero()];
        let mut e = self.p.clone();
        while e.is_positive() {
            if e.is_odd() {
                result = mul(&result, &base);
            }
            base = mul(&base, &base);
            e >>= 1;
        }
        result
    }
    fn gcd_degree(&self, f: &[BigInt; 4], g: &[BigInt; 3]) -> u32 {
        let trim = |v: &mut alloc::vec::Vec<BigInt>| {
            while v.last().is_some_and(|c| c.is_zero()) {
                v.pop();
            }
        };
        let mut a: alloc::vec::Vec<BigInt> = f.to_vec();
        let mut b: alloc::vec::Vec<BigInt> = g.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            // a mod b
            let lead_inv = self.inv(b.last().unwrap());
            while a.len() >= b.len() && !a.is_empty() {
                let shift = a.len() - b.len();
                let coef = self.red(&(a.last().unwrap() * &lead_inv));
                for (i, bi) in b.iter().enumerate() {
                    a[shift + i] = self.red(&(&a[shift + i] - &coef * bi));
                }
                trim(&mut a);
            }
            core::mem::swap(&mut a, &mut b);
        }
        (a.len() as u32).saturating_sub(1)
    }
}

fn rst(a: &mut [BigInt; 5], r: &BigInt, s: &BigInt, t: &BigInt) {
    let [a1, a2, a3, a4, a6] = a.clone();
    a[0] = &a1 + 2 * s;
    a[1] = &a2 - s * &a1 + 3 * r - s * s;
    a[2] = &a3 + r * &a1 + 2 * t;
    a[3] = &a4 - s * &a3 + 2 * r * &a2 - (t + r * s) * &a1 + 3 * r * r - 2 * s * t;
    a[4] = &a6 + r * &a4 + r * r * &a2 + r * r * r - t * &a3 - t * t - r * t * &a1;
}

fn b_invariants(a: &[BigInt; 5]) -> (BigInt, BigInt, BigInt, BigInt) {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    (b2, b4, b6, b8)
}

fn ediv(x: &BigInt, d: &BigInt) -> BigInt {
    debug_assert!((x % d).is_zero());
    x / d
}

/// Local data at `p` of a model that is integral at `p`. If the model is not
/// minimal at `p` it is scaled down first.
pub fn tate_local_data(e: &EllipticCurveQ, p: &BigUint) -> LocalData {
    let pi = BigInt::from(p.clone());
    let fp = Fp { p: &pi };
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let is2 = pi == two;
    let is3 = pi == three;
    let half = if is2 { BigInt::zero() } else { fp.inv(&two) };
    let pi2 = &pi * &pi;
    let pi3 = &pi2 * &pi;
    let pi4 = &pi2 * &pi2;
    let mut a = e.a_invariants().clone();

    loop {
        let (b2, b4, b6, b8) = b_invariants(&a);
        let c4 = &b2 * &b2 - 24 * &b4;
        let c6 = 36 * &b2 * &b4 - &b2 * &b2 * &b2 - 216 * &b6;
        let disc = -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
        let vd = val(&disc, &pi);
        let done =
            |kodaira, f_p, c_p, reduction| LocalData { p: p.clone(), f_p, c_p, kodaira, reduction, disc_valuation: vd };
        if vd == 0 {
            return done(Kodaira::I0, 0, 1, Reduction::Good);
        }
        // move the singular point to (0, 0) mod p
        let (r, t) = if is2 {
            if fp.divides(&b2) {
                let r = fp.red(&a[3]);
                let t = fp.red(&(((&r + &a[1]) * &r + &a[3]) * &r + &a[4]));
                (r, t)
            } else {
                let r = fp.red(&a[2]);
                let t = fp.red(&(&a[3] + &r * &r));
                (r, t)
            }
        } else if is3 {
            let r = if fp.divides(&b2) { fp.red(&-&b6) } else { fp.red(&(-fp.inv(&b2) * &b4)) };
            let t = fp.red(&(&a[0] * &r + &a[2]));
            (r, t)
        } else {
            let r = if fp.divides(&c4) {
                -fp.inv(&BigInt::from(12)) * &b2
            } else {
                -fp.inv(&(12 * &c4)) * (&c6 + &b2 * &c4)
            };
            let t = -&half * (&a[0] * &r + &a[2]);
            (fp.red(&r), fp.red(&t))
        };
        rst(&mut a, &r, &BigInt::zero(), &t);
        let (b2, _b4, b6, b8) = b_invariants(&a);

        if !fp.divides(&b2) {
            let split = fp.quad_roots(&BigInt::one(), &a[0], &-&a[1]);
            let (c_p, red) = if split {
                (vd, Reduction::SplitMultiplicative)
            } else if vd.is_multiple_of(2) {
                (2, Reduction::NonsplitMultiplicative)
            } else {
                (1, Reduction::NonsplitMultiplicative)
            };
            return done(Kodaira::I(vd), 1, c_p, red);
        }
        if val(&a[4], &pi) < 2 {
            return done(Kodaira::II, vd, 1, Reduction::Additive);
        }
        if val(&b8, &pi) < 3 {
            return done(Kodaira::III, vd - 1, 2, Reduction::Additive);
        }
        if val(&b6, &pi) < 3 {
            let c_p = if fp.quad_roots(&BigInt::one(), &ediv(&a[2], &pi), &-ediv(&a[4], &pi2)) { 3 } else { 1 };
            return done(Kodaira::IV, vd - 2, c_p, Reduction::Additive);
        }
        // p | a1, a2; p^2 | a3, a4; p^3 | a6
        let (s, t) = if is2 {
            (fp.red(&a[1]), &pi * fp.red(&ediv(&a[4], &pi2)))
        } else if is3 {
            (a[0].clone(), a[2].clone())
        } else {
            (-&a[0] * &half, -&a[2] * &half)
        };
        rst(&mut a, &BigInt::zero(), &s, &t);

        let b = ediv(&a[1], &pi);
        let c = ediv(&a[3], &pi2);
        let d = ediv(&a[4], &pi3);
        let w = 27 * &d * &d - &b * &b * &c * &c + 4 * &b * &b * &b * &d - 18 * &b * &c * &d + 4 * &c * &c * &c;
        let x = 3 * &c - &b * &b;
        let sw = if fp.divides(&w) {
            if fp.divides(&x) {
                3
            } else {
                2
            }
        } else {
            1
        };

        if sw == 1 {
            let c_p = 1 + fp.cubic_roots(&b, &c, &d);
            return done(Kodaira::I0Star, vd - 4, c_p, Reduction::Additive);
        }

        if sw == 2 {
            // double root: move it to 0
            let r = if is2 {
                fp.red(&c)
            } else if is3 {
                fp.red(&(&c * fp.inv(&b)))
            } else {
                fp.red(&((&b * &c - 9 * &d) * fp.inv(&(2 * &x))))
            };
            rst(&mut a, &(&pi * r), &BigInt::zero(), &BigInt::zero());
            let mut ix: u32 = 3;
            let mut iy: u32 = 3;
            let mut mx = pi2.clone();
            let mut my = pi2.clone();
            let c_p;
            loop {
                let a3t = ediv(&a[2], &my);
                let a6t = ediv(&a[4], &(&mx * &my));
                if fp.divides(&(&a3t * &a3t + 4 * &a6t)) {
                    let t = if is2 { &my * fp.red(&a6t) } else { &my * fp.red(&(-&a3t * &half)) };
                    rst(&mut a, &BigInt::zero(), &BigInt::zero(), &t);
                    my *= &pi;
                    iy += 1;
                    let a2t = ediv(&a[1], &pi);
                    let a4t = ediv(&a[3], &(&pi * &mx));
                    let a6t = ediv(&a[4], &(&mx * &my));
                    if fp.divides(&(&a4t * &a4t - 4 * &a6t * &a2t)) {
                        let r = if is2 {
                            &mx * fp.red(&(&a6t * fp.inv(&a2t)))
                        } else {
                            &mx * fp.red(&(-&a4t * fp.inv(&(2 * &a2t))))
                        };
                        rst(&mut a, &r, &BigInt::zero(), &BigInt::zero());
                        mx *= &pi;
                        ix += 1;
                    } else {
                        c_p = if fp.quad_roots(&a2t, &a4t, &a6t) { 4 } else { 2 };
                        break;
                    }
                } else {
                    c_p = if fp.quad_roots(&BigInt::one(), &a3t, &-&a6t) { 4 } else { 2 };
                    break;
                }
            }
            let m = ix + iy - 5;
            return done(Kodaira::IStar(m), vd - m - 4, c_p, Reduction::Additive);
        }

        // triple root: move it to 0
        let r = if is2 {
            b.clone()
        } else if is3 {
            fp.red(&-&d)
        } else {
            -&b * fp.inv(&three)
        };
        rst(&mut a, &(&pi * fp.red(&r)), &BigInt::zero(), &BigInt::zero());
        let a3t = ediv(&a[2], &pi2);
        let a6t = ediv(&a[4], &pi4);
        if !fp.divides(&(&a3t * &a3t + 4 * &a6t)) {
            let c_p = if fp.quad_roots(&BigInt::one(), &a3t, &-&a6t) { 3 } else { 1 };
            return done(Kodaira::IVStar, vd - 6, c_p, Reduction::Additive);
        }
        let t = if is2 { -&pi2 * fp.red(&a6t) } else { &pi2 * fp.red(&(-&a3t * &half)) };
        rst(&mut a, &BigInt::zero(), &BigInt::zero(), &t);
        if val(&a[3], &pi) < 4 {
            return done(Kodaira::IIIStar, vd - 7, 2, Reduction::Additive);
        }
        if val(&a[4], &pi) < 6 {
            return done(Kodaira::IIStar, vd - 8, 1, Reduction::Additive);
        }
        // not minimal at p
        a[0] = ediv(&a[0], &pi);
        a[1] = ediv(&a[1], &pi2);
        a[2] = ediv(&a[2], &pi3);
        a[3] = ediv(&a[3], &pi4);
        a[4] = ediv(&a[4], &(&pi3 * &pi3));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ld(a: [i64; 5], p: u32) -> LocalData {
        tate_local_data(&EllipticCurveQ::from_i64(a).unwrap(), &BigUint::from(p))
    }

    #[test]
    fn multiplicative_examples() {
        let l = ld([0, -1, 1, -10, -20], 11);
        assert_eq!((l.kodaira, l.f_p, l.c_p, l.reduction), (Kodaira::I(5), 1, 5, Reduction::SplitMultiplicative));
        let l = ld([0, 0, 1, -1, 0], 37);
        assert_eq!((l.kodaira, l.f_p, l.c_p), (Kodaira::I(1), 1, 1));
        // root number -1 forces a_37 = -1
        assert_eq!(l.reduction, Reduction::NonsplitMultiplicative);
        let l = ld([0, -1, 1, -10, -20], 7);
        assert_eq!((l.kodaira, l.f_p, l.c_p, l.reduction), (Kodaira::I0, 0, 1, Reduction::Good));
    }

    #[test]
    fn additive_examples() {
        // y^2 = x^3 + 1, conductor 36 = 2^2 3^2
        let l2 = ld([0, 0, 0, 0, 1], 2);
        let l3 = ld([0, 0, 0, 0, 1], 3);
        assert_eq!((l2.kodaira, l2.f_p, l2.c_p), (Kodaira::IV, 2, 3));
        assert_eq!((l3.kodaira, l3.f_p, l3.c_p), (Kodaira::III, 2, 2));
        // y^2 = x^3 - x, conductor 32
        let l = ld([0, 0, 0, -1, 0], 2);
        assert_eq!((l.kodaira, l.f_p, l.c_p), (Kodaira::III, 5, 2));
    }

    #[test]
    fn non_minimal_input_is_scaled() {
        // [0,0,0,-64,0] is 2^? scaled from [0,0,0,-4,0]; same local data at 2
        let a = ld([0, 0, 0, -64, 0], 2);
        let b = ld([0, 0, 0, -4, 0], 2);
        assert_eq!((a.kodaira, a.f_p, a.c_p), (b.kodaira, b.f_p, b.c_p));
    }

    #[test]
    fn cubic_root_count() {
        let p = BigInt::from(7);
        let fp = Fp { p: &p };
        // (x-1)(x-2)(x-4) = x^3 - 7x^2 + 14x - 8
        assert_eq!(fp.cubic_roots(&(-7).into(), &14.into(), &(-8).into()), 3);
        // x^3 - 2 has no root mod 7 (2 is not a cube)
        assert_eq!(fp.cubic_roots(&0.into(), &0.into(), &(-2).into()), 0);
        // x (x^2 + 1): one root
        assert_eq!(fp.cubic_roots(&0.into(), &1.into(), &0.into()), 1);
    }
}
