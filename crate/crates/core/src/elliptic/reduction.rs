//! Reduction mod p and Frobenius traces.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::curve::EllipticCurveQ;

fn red_u64(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("reduced value fits")
}

/// `a_p = p + 1 - #E(F_p)` for the given model, assuming good reduction at `p`
/// (the caller checks). Uses character sums, so the cost is O(p).
pub fn ap_good(e: &EllipticCurveQ, p: u64) -> i64 {
    assert!(p >= 2);
    if p == 2 {
        return p as i64 + 1 - count_points_naive(e, p) as i64;
    }
    let b2 = red_u64(e.b2(), p);
    let b4 = red_u64(e.b4(), p);
    let b6 = red_u64(e.b6(), p);
    // chi table of squares mod p
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for y in 1..=(p - 1) / 2 {
        chi[((y * y) % p) as usize] = 1;
    }
    let pp = p as u128;
    let c3 = 4 % p;
    let c1 = (2 * b4 as u128 % pp) as u64;
    let mut s: i64 = 0;
    for x in 0..p {
        let x128 = x as u128;
        let f = ((((c3 as u128 * x128 + b2 as u128) % pp * x128 + c1 as u128) % pp * x128) + b6 as u128) % pp;
        s += chi[f as usize] as i64;
    }
    let ap = -s;
    debug_assert!(ap * ap <= 4 * p as i64, "Hasse bound");
    ap
}

/// Projective point count of the reduction mod p, by enumeration.
pub fn count_points_naive(e: &EllipticCurveQ, p: u64) -> u64 {
    let a = e.a_invariants();
    let [a1, a2, a3, a4, a6] = [0, 1, 2, 3, 4].map(|i| red_u64(&a[i], p) as u128);
    let pp = p as u128;
    let mut n = 1u64;
    for x in 0..pp {
        let rhs = (((x + a2) * x % pp + a4) * x + a6) % pp;
        for y in 0..pp {
            let lhs = (y * y + a1 * x * y + a3 * y) % pp;
            if lhs == rhs {
                n += 1;
            }
        }
    }
    n
}

/// Smallest prime factor for every n below `limit`.
pub fn spf_sieve(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit.max(2)];
    for i in 2..limit {
        if spf[i] == 0 {
            let mut j = i;
            while j < limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Dirichlet coefficients `a_1..a_n` (index 0 unused), given `a_p` for primes
/// and whether each prime is bad.
pub fn an_from_ap(n: usize, mut ap: impl FnMut(u64) -> (i64, bool)) -> Vec<i64> {
    let mut an = vec![0i64; n + 1];
    if n == 0 {
        return an;
    }
    an[1] = 1;
    let spf = spf_sieve(n + 1);
    for m in 2..=n {
        let p = spf[m] as usize;
        if p == m {
            let (a, bad) = ap(p as u64);
            an[m] = a;
            let mut pk = p * p;
            let mut prev2 = 1i64;
            let mut prev = a;
            while pk <= n {
                let next = if bad { a * prev } else { a * prev - p as i64 * prev2 };
                an[pk] = next;
                prev2 = prev;
                prev = next;
                pk = match pk.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
            continue;
        }
        let mut q = m;
        let mut pk = 1;
        while q % p == 0 {
            q /= p;
            pk *= p;
        }
        if q != 1 {
            an[m] = an[pk] * an[q];
        }
    }
    an
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traces_of_11a1() {
        let e = EllipticCurveQ::from_i64([0, -1, 1, -10, -20]).unwrap();
        // q prod (1-q^n)^2 (1-q^11n)^2
        let expected = [(2, -2), (3, -1), (5, 1), (7, -2), (13, 4), (17, -2), (19, 0), (23, -1)];
        for (p, a) in expected {
            assert_eq!(ap_good(&e, p), a, "p = {p}");
            assert_eq!(count_points_naive(&e, p) as i64, p as i64 + 1 - a);
        }
    }

    #[test]
    fn coefficients_are_multiplicative() {
        let e = EllipticCurveQ::from_i64([0, -1, 1, -10, -20]).unwrap();
        let an = an_from_ap(30, |p| if p == 11 { (1, true) } else { (ap_good(&e, p), false) });
        let head = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4];
        assert_eq!(&an[1..14], &head);
        assert_eq!(an[6], an[2] * an[3]);
    }
}
