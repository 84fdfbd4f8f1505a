//! Naive and canonical heights, height pairing and regulator.
//!
//! Normalization: `h(P) = ln max(|num x|, |den x|)` and `ĥ(P) = lim h(2^n P) / 4^n`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::curve::EllipticCurveQ;
use super::global::{ArithmeticError, Curve};
use super::periods::ln_abs_bigint;
use super::point::RationalPoint;
use crate::primes::{factor, valuation};
use crate::real::Real;

/// Heights below this are treated as zero (torsion).
pub const TORSION_HEIGHT: f64 = 1e-10;

/// `ln max(|num x|, |den x|)`; zero at infinity.
pub fn naive_height<R: Real>(p: &RationalPoint) -> R {
    match p.x() {
        None => R::zero(),
        Some(x) => {
            let n = x.numer().abs();
            let d = x.denom().abs();
            ln_abs_bigint(if n > d { &n } else { &d })
        }
    }
}

fn v_rational(x: &BigRational, p: &BigInt) -> i64 {
    if x.is_zero() {
        return i64::MAX / 4;
    }
    valuation(x.numer(), p).unwrap() as i64 - valuation(x.denom(), p).unwrap() as i64
}

/// Archimedean local height by Tate's series with the shift trick that keeps
/// it convergent on every real point.
pub fn lambda_infinity<R: Real>(e: &EllipticCurveQ, p: &RationalPoint) -> R {
    let Some(x) = p.x() else { return R::zero() };
    let x = R::from_ratio(x);
    let b2 = R::from_bigint(e.b2());
    let b4 = R::from_bigint(e.b4());
    let b6 = R::from_bigint(e.b6());
    let b8 = R::from_bigint(e.b8());
    let one = R::one();
    let two = R::from_f64(2.0);
    let three = R::from_f64(3.0);
    let four = R::from_f64(4.0);
    // invariants of the model with x shifted by 1
    let b2s = b2 - R::from_f64(12.0);
    let b4s = b4 - b2 + R::from_f64(6.0);
    let b6s = b6 - two * b4 + b2 - four;
    let b8s = b8 - three * b6 + three * b4 - b2 + three;
    let hmax = [four, b2.abs(), two * b4.abs(), two * b6.abs(), b8.abs()]
        .into_iter()
        .fold(R::zero(), |m, v| m.max(v))
        .to_f64();
    let digits = -libm::log10(R::epsilon().to_f64()) + 2.0;
    let n_iter = libm::ceil(5.0 / 3.0 * digits + 0.5 + 0.75 * libm::log(7.0 + 4.0 / 3.0 * libm::log(hmax))) as usize;
    let (mut t, mut beta) = if x.abs() < R::from_f64(0.5) { (one / (x + one), false) } else { (one / x, true) };
    let mut mu = -t.abs().ln();
    let mut f = one;
    let quarter = R::from_f64(0.25);
    for _ in 0..=n_iter {
        f *= quarter;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t2 * t2;
        let (w, z, zw) = if beta {
            let w = b6 * t4 + two * b4 * t3 + b2 * t2 + four * t;
            let z = one - b4 * t2 - two * b6 * t3 - b8 * t4;
            (w, z, z + w)
        } else {
            let w = b6s * t4 + two * b4s * t3 + b2s * t2 + four * t;
            let z = one - b4s * t2 - two * b6s * t3 - b8s * t4;
            (w, z, z - w)
        };
        if w.abs() <= two * z.abs() {
            mu += f * z.abs().ln();
            t = w / z;
        } else {
            mu += f * zw.abs().ln();
            t = w / zw;
            beta = !beta;
        }
    }
    mu
}

/// Non-archimedean local height at `p` on a model minimal at `p`.
pub fn lambda_p<R: Real>(e: &EllipticCurveQ, pt: &RationalPoint, p: &BigInt) -> R {
    let RationalPoint::Affine { x, y } = pt else { return R::zero() };
    let lnp = ln_abs_bigint::<R>(p);
    let vx = v_rational(x, p);
    if vx < 0 {
        return R::from_i64(-vx) * lnp;
    }
    let q = |n: &BigInt| BigRational::from_integer(n.clone());
    let [a1, a2, a3, a4, _] = e.a_invariants().clone().map(|n| q(&n));
    let three = q(&BigInt::from(3));
    let two = q(&BigInt::from(2));
    let va = v_rational(&(&three * x * x + &two * &a2 * x + &a4 - &a1 * y), p);
    let vb = v_rational(&(&two * y + &a1 * x + &a3), p);
    if va <= 0 || vb <= 0 {
        return R::zero();
    }
    let n = valuation(e.discriminant(), p).unwrap() as i64;
    if valuation(e.c4(), p) == Some(0) {
        // multiplicative reduction
        // with m = min(vb, n/2) and m2 = 2m: m (m - n) / n = m2 (m2 - 2n) / 4n
        let m2 = (2 * vb).min(n);
        return R::from_i64(m2 * (m2 - 2 * n)) / R::from_i64(4 * n) * lnp;
    }
    let (b2, b4, b6, b8) = (q(e.b2()), q(e.b4()), q(e.b6()), q(e.b8()));
    let psi3 = &three * x * x * x * x + &b2 * x * x * x + &three * &b4 * x * x + &three * &b6 * x + &b8;
    let vc = v_rational(&psi3, p);
    if vc >= 3 * vb {
        R::from_i64(-2 * vb) / R::from_f64(3.0) * lnp
    } else {
        R::from_i64(-vc) / R::from_f64(4.0) * lnp
    }
}

/// Canonical height of a point on a minimal model.
pub fn canonical_height_minimal<R: Real>(e_min: &EllipticCurveQ, p: &RationalPoint) -> R {
    let RationalPoint::Affine { x, .. } = p else { return R::zero() };
    let mut h = lambda_infinity::<R>(e_min, p);
    let mut primes: Vec<BigInt> = factor(e_min.discriminant()).into_iter().map(|(p, _)| BigInt::from(p)).collect();
    for (q, _) in factor(x.denom()) {
        let q = BigInt::from(q);
        if !primes.contains(&q) {
            primes.push(q);
        }
    }
    for q in &primes {
        h += lambda_p::<R>(e_min, p, q);
    }
    if h.to_f64().abs() < TORSION_HEIGHT {
        R::zero()
    } else {
        h
    }
}

/// Canonical height of a point on the curve's input model.
pub fn canonical_height<R: Real>(e: &Curve, p: &RationalPoint) -> Result<R, ArithmeticError> {
    let q = e.to_minimal_point(p)?;
    Ok(canonical_height_minimal(e.minimal_model(), &q))
}

/// `<P, Q> = (ĥ(P + Q) - ĥ(P) - ĥ(Q)) / 2`, points on the minimal model.
pub fn height_pairing_minimal<R: Real>(e_min: &EllipticCurveQ, p: &RationalPoint, q: &RationalPoint) -> R {
    let s = e_min.add(p, q);
    let h = |pt: &RationalPoint| canonical_height_minimal::<R>(e_min, pt);
    (h(&s) - h(p) - h(q)) * R::from_f64(0.5)
}

/// Gram matrix of the height pairing, points on the minimal model.
pub fn gram_matrix_minimal<R: Real>(e_min: &EllipticCurveQ, points: &[RationalPoint]) -> Vec<Vec<R>> {
    let n = points.len();
    let diag: Vec<R> = points.iter().map(|p| canonical_height_minimal(e_min, p)).collect();
    let mut g = alloc::vec![alloc::vec![R::zero(); n]; n];
    for i in 0..n {
        g[i][i] = diag[i];
        for j in i + 1..n {
            let s = canonical_height_minimal::<R>(e_min, &e_min.add(&points[i], &points[j]));
            let v = (s - diag[i] - diag[j]) * R::from_f64(0.5);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

/// Determinant by Gaussian elimination with partial pivoting; 1 for an empty matrix.
pub fn determinant<R: Real>(m: &[Vec<R>]) -> R {
    let n = m.len();
    let mut a: Vec<Vec<R>> = m.to_vec();
    let mut det = R::one();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        if a[piv][c] == R::zero() {
            return R::zero();
        }
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    det
}

/// Cholesky factor of a symmetric matrix, or `None` if it is not positive definite.
pub fn cholesky<R: Real>(m: &[Vec<R>]) -> Option<Vec<Vec<R>>> {
    let n = m.len();
    let mut l = alloc::vec![alloc::vec![R::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= R::zero() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Regulator of points on the input model; 1 for no points.
pub fn regulator<R: Real>(e: &Curve, points: &[RationalPoint]) -> Result<R, ArithmeticError> {
    let pts = points.iter().map(|p| e.to_minimal_point(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(determinant(&gram_matrix_minimal::<R>(e.minimal_model(), &pts)))
}

/// Bounds `lower <= ĥ(P) - h(P) <= upper` valid for every rational point,
/// from the Weierstrass coefficients of the model.
pub fn height_difference_bounds(e: &EllipticCurveQ) -> (f64, f64) {
    let j = e.j_invariant();
    let h = |q: &BigRational| {
        let n = q.numer().abs();
        let d = q.denom().abs();
        crate::real::ln_bigint(if n > d { &n } else { &d })
    };
    let h_inf = |v: f64| libm::log(libm::fabs(v).max(1.0));
    let delta = BigRational::from_integer(e.discriminant().clone());
    let j_f = j.to_f64().unwrap_or(f64::INFINITY);
    let h_inf_j = if j_f.is_finite() { h_inf(j_f) } else { h(&j) };
    let b2 = e.b2().to_f64().unwrap_or(f64::INFINITY);
    let two_star: f64 = if e.b2().is_zero() { 1.0 } else { 2.0 };
    let mu = h(&delta) / 12.0 + h_inf_j / 12.0 + h_inf(b2 / 12.0) / 2.0 + libm::log(two_star) / 2.0;
    let lower = 2.0 * (-h(&j) / 24.0 - mu - 0.961);
    let upper = 2.0 * (mu + 1.07);
    (lower, upper)
}
