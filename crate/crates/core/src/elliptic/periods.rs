//! Period lattice, period ratio and the Faltings height.

use alloc::vec::Vec;

use num_complex::Complex;

use super::curve::EllipticCurveQ;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArchimedeanData<R> {
    /// Least positive real period of the lattice.
    pub omega_lattice: R,
    /// Volume of E(R) for the invariant differential: `real_components * omega_lattice`.
    pub omega: R,
    pub real_components: u8,
    /// Period ratio in the standard fundamental domain.
    pub tau: Complex<R>,
    /// Period ratio `w2 / w1` with `w1` the real period, before reduction.
    pub tau_real: Complex<R>,
    /// The basis `(w1, w2)` with `w1 = omega_lattice`.
    pub w1: Complex<R>,
    pub w2: Complex<R>,
    pub c_infty: R,
}

pub fn agm<R: Real>(mut a: R, mut b: R) -> R {
    let half = R::from_f64(0.5);
    for _ in 0..200 {
        let next_a = (a + b) * half;
        let next_b = (a * b).sqrt();
        a = next_a;
        b = next_b;
        if (a - b).abs() <= a.abs() * R::epsilon() * R::from_f64(4.0) {
            break;
        }
    }
    (a + b) * half
}

// Real roots of x^3 + a x^2 + b x + c, in decreasing order.
fn cubic_real_roots<R: Real>(a: R, b: R, c: R) -> Vec<R> {
    let (fa, fb, fc) = (a.to_f64(), b.to_f64(), c.to_f64());
    let p = fb - fa * fa / 3.0;
    let q = 2.0 * fa * fa * fa / 27.0 - fa * fb / 3.0 + fc;
    let d = q * q / 4.0 + p * p * p / 27.0;
    let shift = -fa / 3.0;
    let mut approx: Vec<f64> = if d > 0.0 {
        let s = libm::sqrt(d);
        alloc::vec![libm::cbrt(-q / 2.0 + s) + libm::cbrt(-q / 2.0 - s) + shift]
    } else {
        let m = 2.0 * libm::sqrt(-p / 3.0);
        let arg = if m == 0.0 { 0.0 } else { (3.0 * q / (p * m)).clamp(-1.0, 1.0) };
        let theta = libm::acos(arg) / 3.0;
        (0..3).map(|k| m * libm::cos(theta - 2.0 * core::f64::consts::PI * k as f64 / 3.0) + shift).collect()
    };
    approx.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let g = |x: R| ((x + a) * x + b) * x + c;
    let dg = |x: R| (R::from_f64(3.0) * x + R::from_f64(2.0) * a) * x + b;
    approx
        .into_iter()
        .map(|x0| {
            let mut x = R::from_f64(x0);
            for _ in 0..60 {
                let d = dg(x);
                if d == R::zero() {
                    break;
                }
                let step = g(x) / d;
                x -= step;
                if step.abs() <= x.abs().max(R::one()) * R::epsilon() {
                    break;
                }
            }
            x
        })
        .collect()
}

/// Moves `tau` (upper half plane) into `-1/2 <= Re < 1/2, |tau| >= 1`.
pub fn reduce_to_fundamental_domain<R: Real>(mut tau: Complex<R>) -> Complex<R> {
    let one = R::one();
    for _ in 0..1000 {
        let n = (tau.re + R::from_f64(0.5)).floor();
        tau.re -= n;
        let norm = tau.re * tau.re + tau.im * tau.im;
        if norm < one - R::epsilon() * R::from_f64(16.0) {
            tau = Complex::new(-tau.re / norm, tau.im / norm);
        } else {
            break;
        }
    }
    tau
}

/// Period data of a model; the lattice is that of `dx / (2y + a1 x + a3)`.
pub fn archimedean_data<R: Real>(e: &EllipticCurveQ) -> ArchimedeanData<R> {
    let b2 = R::from_bigint(e.b2());
    let b4 = R::from_bigint(e.b4());
    let b6 = R::from_bigint(e.b6());
    let quarter = R::from_f64(0.25);
    let half = R::from_f64(0.5);
    let pi = R::pi();
    let roots = cubic_real_roots(b2 * quarter, b4 * half, b6 * quarter);
    let positive = e.discriminant() > &num_bigint::BigInt::from(0);
    let (w1, w2, components) = if positive {
        assert_eq!(roots.len(), 3, "positive discriminant has three real roots");
        let (e1, e2, e3) = (roots[0], roots[1], roots[2]);
        let w1 = pi / agm((e1 - e3).sqrt(), (e1 - e2).sqrt());
        let w2 = pi / agm((e1 - e3).sqrt(), (e2 - e3).sqrt());
        (Complex::new(w1, R::zero()), Complex::new(R::zero(), w2), 2u8)
    } else {
        let e1 = roots[0];
        let a = R::from_f64(3.0) * e1 + b2 * quarter;
        let b = (R::from_f64(3.0) * e1 * e1 + b2 * half * e1 + b4 * half).sqrt();
        let two = R::from_f64(2.0);
        let w1 = two * pi / agm(two * b.sqrt(), (two * b + a).sqrt());
        let im = pi / agm(two * b.sqrt(), (two * b - a).sqrt());
        (Complex::new(w1, R::zero()), Complex::new(-w1 * half, im), 1u8)
    };
    let tau_real = w2 / w1;
    let tau = reduce_to_fundamental_domain(tau_real);
    let omega_lattice = w1.re;
    let omega = R::from_i64(components as i64) * omega_lattice;
    ArchimedeanData { omega_lattice, omega, real_components: components, tau, tau_real, w1, w2, c_infty: omega }
}

/// `(omega, real_components)` together with the rest of the archimedean data.
pub fn real_period_and_components<R: Real>(e: &EllipticCurveQ) -> ArchimedeanData<R> {
    archimedean_data(e)
}

pub fn tau_in_fundamental_domain<R: Real>(e: &EllipticCurveQ) -> Complex<R> {
    let tau = archimedean_data::<R>(e).tau;
    assert!(tau.im.to_f64() >= 0.75f64.sqrt() - 1e-12, "Im tau below sqrt(3)/2");
    tau
}

/// `ln |Delta(tau)|` for `Delta(tau) = (2 pi)^12 q prod (1 - q^n)^24`.
pub fn ln_abs_modular_discriminant<R: Real>(tau: Complex<R>) -> R {
    let two_pi = R::pi() * R::from_f64(2.0);
    let r = (-two_pi * tau.im).exp();
    let mut s = R::zero();
    let mut rn = r;
    let mut n = 1i64;
    while rn > R::epsilon() * R::from_f64(1e-3) {
        let angle = two_pi * R::from_i64(n) * tau.re;
        let re = R::one() - rn * angle.cos();
        let im = rn * angle.sin();
        s += (re * re + im * im).ln() * R::from_f64(0.5);
        n += 1;
        rn *= r;
    }
    R::from_f64(12.0) * two_pi.ln() - two_pi * tau.im + R::from_f64(24.0) * s
}

/// Faltings height of a minimal model:
/// `h = (ln|Delta_min| - 6 ln Im tau - ln|Delta(tau)|) / 12`.
pub fn faltings_height<R: Real>(e_min: &EllipticCurveQ) -> R {
    let tau = tau_in_fundamental_domain::<R>(e_min);
    let ln_delta = ln_abs_bigint::<R>(e_min.discriminant());
    let ln_mod = ln_abs_modular_discriminant(tau);
    // |eta|^24 part never exceeds its leading term by more than 1/9
    debug_assert!(
        (ln_mod - R::from_f64(12.0) * (R::pi() * R::from_f64(2.0)).ln()).to_f64()
            <= -2.0 * core::f64::consts::PI * tau.im.to_f64() + 1.0 / 9.0
    );
    (ln_delta - R::from_f64(6.0) * tau.im.ln() - ln_mod) / R::from_f64(12.0)
}

/// `ln |n|` in the working precision.
pub fn ln_abs_bigint<R: Real>(n: &num_bigint::BigInt) -> R {
    use num_traits::Signed;
    let m = n.abs();
    let bits = m.bits();
    if bits <= 900 {
        return R::from_bigint(&m).ln();
    }
    let shift = bits - 200;
    let top = &m >> shift;
    R::from_bigint(&top).ln() + R::from_f64(shift as f64) * R::from_f64(2.0).ln()
}
