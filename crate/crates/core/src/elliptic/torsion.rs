//! Rational torsion.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::curve::EllipticCurveQ;
use super::point::RationalPoint;
use super::reduction::{ap_good, count_points_naive};
use crate::primes::{factor, primes_up_to};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionGroup {
    /// Invariant factors `(n1, n2)` with `n1 | n2`; cyclic groups have `n1 = 1`.
    pub structure: (u32, u32),
    /// All torsion points, identity first.
    pub points: Vec<RationalPoint>,
}

impl TorsionGroup {
    pub fn order(&self) -> u32 {
        self.structure.0 * self.structure.1
    }
}

/// Multiple of the torsion order from point counts at good primes `p <= limit`.
/// Odd primes bound the whole group. At `p = 2` only the odd part of the count
/// is used, since 2-power torsion need not inject there.
pub fn torsion_order_multiple(e: &EllipticCurveQ, limit: u64) -> u64 {
    let disc = e.discriminant();
    let mut g: u64 = 0;
    for p in primes_up_to(limit) {
        if (disc % p).is_zero() {
            continue;
        }
        let n = if p == 2 {
            let mut n = count_points_naive(e, 2);
            while n.is_multiple_of(2) {
                n /= 2;
            }
            // multiply back the largest power of 2 any curve could need
            n * 16
        } else {
            (p as i64 + 1 - ap_good(e, p)) as u64
        };
        g = g.gcd(&n);
    }
    if g == 0 {
        16 * 3 * 5 * 7
    } else {
        g
    }
}

// Integer roots of x^3 + a x + b.
fn integer_roots_depressed_cubic(a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| x * x * x + a * x + b;
    let bound = BigInt::one() + a.abs().max(b.abs());
    // monotone pieces on the integers
    let mut pieces: Vec<(BigInt, BigInt, bool)> = Vec::new();
    if a.is_negative() {
        let q = (-a) / 3u32; // floor(-a/3), -a > 0
        let fl = q.sqrt();
        let ce = if (&fl * &fl * 3u32) < (-a) { &fl + 1u32 } else { fl.clone() };
        pieces.push((-&bound, -&ce, true));
        pieces.push((-&fl, fl.clone(), false));
        pieces.push((ce, bound.clone(), true));
    } else {
        pieces.push((-&bound, bound, true));
    }
    let mut roots: Vec<BigInt> = Vec::new();
    for (lo, hi, increasing) in pieces {
        if lo > hi {
            continue;
        }
        let (mut lo, mut hi) = (lo, hi);
        let sign = |x: &BigInt| {
            let v = f(x);
            if increasing {
                v.signum()
            } else {
                -v.signum()
            }
        };
        if sign(&lo).is_positive() || sign(&hi).is_negative() {
            continue;
        }
        // invariant: sign(lo) <= 0 <= sign(hi)
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            if sign(&mid).is_negative() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        for x in [lo, hi] {
            if f(&x).is_zero() && !roots.contains(&x) {
                roots.push(x);
            }
        }
    }
    roots
}

fn sqrt_divisors(n: &BigInt) -> Vec<BigInt> {
    // all y > 0 with y^2 | n
    let mut ys = alloc::vec![BigInt::one()];
    for (p, e) in factor(n) {
        let p = BigInt::from(p);
        let mut next = Vec::new();
        for y in &ys {
            let mut pk = BigInt::one();
            for _ in 0..=e / 2 {
                next.push(y * &pk);
                pk *= &p;
            }
        }
        ys = next;
    }
    ys
}

/// Full rational torsion subgroup, by Lutz-Nagell on an integral short model.
pub fn torsion_subgroup(e: &EllipticCurveQ) -> TorsionGroup {
    // Y^2 = X^3 - 27 c4 X - 54 c6, X = 36x + 3 b2, Y = 108 (2y + a1 x + a3)
    let a = -BigInt::from(27) * e.c4();
    let b = -BigInt::from(54) * e.c6();
    let disc = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
    let mut ys = alloc::vec![BigInt::zero()];
    ys.extend(sqrt_divisors(&disc));
    let bound = torsion_order_multiple(e, 100);
    let q = |n: BigInt| BigRational::from_integer(n);
    let [a1, _, a3, _, _] = e.a_invariants().clone().map(q);
    let mut points = alloc::vec![RationalPoint::Infinity];
    for y0 in ys {
        for big_x in integer_roots_depressed_cubic(&a, &(&b - &y0 * &y0)) {
            for big_y in [y0.clone(), -&y0] {
                let x = (q(big_x.clone()) - q(BigInt::from(3) * e.b2())) / q(BigInt::from(36));
                let y = (q(big_y) / q(BigInt::from(108)) - &a1 * &x - &a3) / q(BigInt::from(2));
                let pt = RationalPoint::new(x, y);
                if points.contains(&pt) || !e.contains(&pt) {
                    continue;
                }
                if let Some(n) = e.order_up_to(&pt, 12) {
                    if bound.is_multiple_of(n) {
                        points.push(pt);
                    }
                }
                if y0.is_zero() {
                    break;
                }
            }
        }
    }
    let n = points.len() as u32;
    let two_torsion = points.iter().skip(1).filter(|p| e.order_up_to(p, 2) == Some(2)).count();
    let structure = if two_torsion == 3 { (2, n / 2) } else { (1, n) };
    TorsionGroup { structure, points }
}

/// Order of `p` if it is a torsion point, else `None`.
pub fn torsion_order(e: &EllipticCurveQ, p: &RationalPoint) -> Option<u64> {
    e.order_up_to(p, 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: [i64; 5]) -> (u32, u32) {
        torsion_subgroup(&EllipticCurveQ::from_i64(a).unwrap()).structure
    }

    #[test]
    fn known_torsion_structures() {
        assert_eq!(t([0, -1, 1, -10, -20]), (1, 5)); // 11a1
        assert_eq!(t([0, 0, 1, -1, 0]), (1, 1)); // 37a1
        assert_eq!(t([0, 0, 0, 0, 1]), (1, 6)); // 36a1
        assert_eq!(t([1, 1, 1, -10, -10]), (2, 4)); // 15a1
        assert_eq!(t([0, 0, 0, -1, 0]), (2, 2)); // 32a2
        assert_eq!(t([1, 0, 1, 4, -6]), (1, 6)); // 14a1
    }

    #[test]
    fn cubic_integer_roots() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let mut r = integer_roots_depressed_cubic(&BigInt::from(-7), &BigInt::from(6));
        r.sort();
        assert_eq!(r, [-3, 1, 2].map(BigInt::from));
        assert!(integer_roots_depressed_cubic(&BigInt::from(0), &BigInt::from(2)).is_empty());
        assert_eq!(integer_roots_depressed_cubic(&BigInt::from(0), &BigInt::from(-8)), [BigInt::from(2)]);
    }

    #[test]
    fn order_multiple_detects_two_power_torsion() {
        let e = EllipticCurveQ::from_i64([1, 1, 1, -10, -10]).unwrap();
        assert_eq!(torsion_order_multiple(&e, 100) % 8, 0);
    }
}
