//! L(E, s) near s = 1 for curves of analytic order 0 and 1.
//!
//! With `theta(t) = sum a_n exp(-2 pi n t / sqrt N)` the functional equation
//! reads `theta(1/t) = eps t^2 theta(t)`, which is what the root number test
//! checks. L(1) and L'(1) come from the usual rapidly convergent series.

use alloc::vec::Vec;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::elliptic::reduction::an_from_ap;
use crate::elliptic::Curve;
use crate::real::Real;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LSeriesError {
    #[error("neither sign fits the functional equation (residuals {plus:e}, {minus:e})")]
    Inconclusive { plus: f64, minus: f64 },
    #[error("root number is {0}, wrong branch")]
    WrongSign(i8),
    #[error("L-value {value:e} below threshold: analytic order at least 2")]
    OrderTooHigh { value: f64 },
    #[error("conductor too large for series evaluation")]
    ConductorTooLarge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCoefficients {
    pub n_max: usize,
    /// `a[n]` for `1 <= n <= n_max`; `a[0]` is unused and zero.
    pub a: Vec<i64>,
}

impl DirichletCoefficients {
    pub fn get(&self, n: usize) -> i64 {
        self.a[n]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadingCoefficient<R> {
    pub analytic_order: u32,
    /// `L^(r)(1) / r!`.
    pub value: R,
    pub root_number: i8,
    pub truncation_error: R,
    pub n_max: usize,
}

pub fn coefficients(e: &Curve, n_max: usize) -> DirichletCoefficients {
    assert!(n_max >= 1);
    let a = an_from_ap(n_max, |p| e.ap_any(p));
    DirichletCoefficients { n_max, a }
}

/// Test points for the functional equation; `t = 1` is degenerate.
pub const ROOT_NUMBER_TEST_POINTS: [f64; 2] = [1.1, 1.3];
const ROOT_NUMBER_TOLERANCE: f64 = 1e-6;

/// Coefficients and conductor, with the series used by the public entry points.
#[derive(Clone, Debug)]
pub struct LSeries {
    conductor: f64,
    coeffs: DirichletCoefficients,
}

impl LSeries {
    /// Enough coefficients for `theta(t)` with `t >= 1/1.3` and all series at
    /// tolerance `tol`.
    pub fn new(e: &Curve, tol: f64) -> Result<Self, LSeriesError> {
        let n = e.conductor().to_f64().ok_or(LSeriesError::ConductorTooLarge)?;
        let m = terms_for(n, tol).max(theta_terms(n, 1.0 / 1.3));
        if m > 50_000_000 {
            return Err(LSeriesError::ConductorTooLarge);
        }
        Ok(LSeries { conductor: n, coeffs: coefficients(e, m) })
    }

    pub fn with_terms(e: &Curve, n_max: usize) -> Result<Self, LSeriesError> {
        let n = e.conductor().to_f64().ok_or(LSeriesError::ConductorTooLarge)?;
        Ok(LSeries { conductor: n, coeffs: coefficients(e, n_max) })
    }

    pub fn coefficients(&self) -> &DirichletCoefficients {
        &self.coeffs
    }

    pub fn conductor(&self) -> f64 {
        self.conductor
    }

    fn scale<R: Real>(&self) -> R {
        R::from_f64(2.0) * R::pi() / R::from_f64(self.conductor).sqrt()
    }

    pub fn theta<R: Real>(&self, t: R) -> R {
        let step = (-(self.scale::<R>() * t)).exp();
        let mut q = step;
        let mut s = R::zero();
        for n in 1..=self.coeffs.n_max {
            let a = self.coeffs.a[n];
            if a != 0 {
                s += R::from_i64(a) * q;
            }
            q *= step;
            if q < R::epsilon() * R::epsilon() {
                break;
            }
        }
        s
    }

    /// Residuals `|theta(1/t) - eps t^2 theta(t)|`, relative, for `eps = +1, -1`.
    pub fn functional_equation_residuals(&self, t: f64) -> (f64, f64) {
        assert!((t - 1.0).abs() > 1e-3, "t = 1 cannot distinguish the signs");
        let a = self.theta::<f64>(1.0 / t);
        let b = t * t * self.theta::<f64>(t);
        let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        ((a - b).abs() / scale, (a + b).abs() / scale)
    }

    pub fn root_number(&self) -> Result<i8, LSeriesError> {
        let mut plus = 0.0f64;
        let mut minus = 0.0f64;
        for t in ROOT_NUMBER_TEST_POINTS {
            let (p, m) = self.functional_equation_residuals(t);
            plus = plus.max(p);
            minus = minus.max(m);
        }
        match (plus < ROOT_NUMBER_TOLERANCE, minus < ROOT_NUMBER_TOLERANCE) {
            (true, false) => Ok(1),
            (false, true) => Ok(-1),
            _ => Err(LSeriesError::Inconclusive { plus, minus }),
        }
    }

    /// `2 sum_{n <= m} (a_n / n) exp(-2 pi n / sqrt N)` and its tail bound.
    pub fn l1_truncated<R: Real>(&self, m: usize) -> (R, R) {
        let m = m.min(self.coeffs.n_max);
        let step = (-self.scale::<R>()).exp();
        let mut q = step;
        let mut s = R::zero();
        for n in 1..=m {
            let a = self.coeffs.a[n];
            if a != 0 {
                s += R::from_i64(a) / R::from_i64(n as i64) * q;
            }
            q *= step;
        }
        (R::from_f64(2.0) * s, R::from_f64(l1_tail(self.conductor, m)))
    }

    /// `2 sum_{n <= m} (a_n / n) E1(2 pi n / sqrt N)` and its tail bound.
    pub fn l1_derivative_truncated<R: Real>(&self, m: usize) -> (R, R) {
        let m = m.min(self.coeffs.n_max);
        let c = self.scale::<R>();
        let mut s = R::zero();
        for n in 1..=m {
            let a = self.coeffs.a[n];
            if a != 0 {
                s += R::from_i64(a) / R::from_i64(n as i64) * exp_integral_e1(c * R::from_i64(n as i64));
            }
        }
        (R::from_f64(2.0) * s, R::from_f64(l1_derivative_tail(self.conductor, m)))
    }
}

// n_max for which theta(t) has converged to double-double accuracy
fn theta_terms(n: f64, t: f64) -> usize {
    let c = 2.0 * core::f64::consts::PI * t / libm::sqrt(n);
    libm::ceil(75.0 / c) as usize + 1
}

// tail of 2 sum_{n > m} |a_n|/n e^{-cn} with |a_n| <= n
fn l1_tail(n: f64, m: usize) -> f64 {
    let c = 2.0 * core::f64::consts::PI / libm::sqrt(n);
    2.0 * libm::exp(-c * (m as f64 + 1.0)) / (1.0 - libm::exp(-c))
}

// same for E1, using E1(x) <= e^{-x} / x
fn l1_derivative_tail(n: f64, m: usize) -> f64 {
    let c = 2.0 * core::f64::consts::PI / libm::sqrt(n);
    2.0 * libm::exp(-c * (m as f64 + 1.0)) / (c * (m as f64 + 1.0)) / (1.0 - libm::exp(-c))
}

/// Smallest `m` whose tail bounds for both series are below `tol`.
pub fn terms_for(n: f64, tol: f64) -> usize {
    let mut m = 1usize;
    while l1_tail(n, m) >= tol || l1_derivative_tail(n, m) >= tol {
        m = m + m / 8 + 1;
    }
    // back off to the smallest such m
    let mut lo = m / 2;
    while lo < m {
        let mid = (lo + m) / 2;
        if l1_tail(n, mid) < tol && l1_derivative_tail(n, mid) < tol {
            m = mid;
        } else {
            lo = mid + 1;
        }
    }
    m
}

/// Exponential integral `E1(x) = int_x^inf e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1<R: Real>(x: R) -> R {
    assert!(x > R::zero());
    let eps = R::epsilon();
    if x <= R::from_f64(1.5) {
        // -gamma - ln x - sum (-x)^k / (k k!)
        let mut s = R::zero();
        let mut term = R::one();
        let mut k = 1i64;
        loop {
            term = term * (-x) / R::from_i64(k);
            let add = term / R::from_i64(k);
            s += add;
            if add.abs() <= eps * s.abs().max(R::one()) * R::from_f64(0.1) {
                break;
            }
            k += 1;
        }
        -R::euler_gamma() - x.ln() - s
    } else {
        // continued fraction, modified Lentz
        let tiny = R::from_f64(1e-300);
        let one = R::one();
        let mut b = x + one;
        let mut c = one / tiny;
        let mut d = one / b;
        let mut h = d;
        let mut i = 1i64;
        loop {
            let an = -R::from_i64(i * i);
            b += R::from_f64(2.0);
            d = one / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - one).abs() <= eps {
                break;
            }
            i += 1;
            if i > 100_000 {
                break;
            }
        }
        h * (-x).exp()
    }
}

fn check_order<R: Real>(value: R, tol: f64) -> Result<(), LSeriesError> {
    if value.to_f64().abs() <= tol * 10.0 {
        return Err(LSeriesError::OrderTooHigh { value: value.to_f64() });
    }
    Ok(())
}

pub fn root_number(e: &Curve) -> Result<i8, LSeriesError> {
    LSeries::new(e, 1e-12)?.root_number()
}

pub fn l_value_at_1<R: Real>(e: &Curve, tol: f64) -> Result<LeadingCoefficient<R>, LSeriesError> {
    let l = LSeries::new(e, tol)?;
    let eps = l.root_number()?;
    if eps != 1 {
        return Err(LSeriesError::WrongSign(eps));
    }
    let m = terms_for(l.conductor, tol);
    let (value, err) = l.l1_truncated::<R>(m);
    Ok(LeadingCoefficient { analytic_order: 0, value, root_number: 1, truncation_error: err, n_max: m })
}

pub fn l_derivative_at_1<R: Real>(e: &Curve, tol: f64) -> Result<LeadingCoefficient<R>, LSeriesError> {
    let l = LSeries::new(e, tol)?;
    let eps = l.root_number()?;
    if eps != -1 {
        return Err(LSeriesError::WrongSign(eps));
    }
    let m = terms_for(l.conductor, tol);
    let (value, err) = l.l1_derivative_truncated::<R>(m);
    Ok(LeadingCoefficient { analytic_order: 1, value, root_number: -1, truncation_error: err, n_max: m })
}

/// Leading Taylor coefficient at s = 1 for analytic order 0 or 1.
pub fn leading_coefficient<R: Real>(e: &Curve, tol: f64) -> Result<LeadingCoefficient<R>, LSeriesError> {
    let l = LSeries::new(e, tol)?;
    let eps = l.root_number()?;
    let m = terms_for(l.conductor, tol);
    let (value, err, order) = if eps == 1 {
        let (v, e) = l.l1_truncated::<R>(m);
        (v, e, 0)
    } else {
        let (v, e) = l.l1_derivative_truncated::<R>(m);
        (v, e, 1)
    };
    check_order(value, tol)?;
    Ok(LeadingCoefficient { analytic_order: order, value, root_number: eps, truncation_error: err, n_max: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::DoubleDouble;

    fn curve(a: [i64; 5]) -> Curve {
        Curve::from_coefficients(a).unwrap()
    }

    #[test]
    fn coefficients_of_11a1() {
        let c = coefficients(&curve([0, -1, 1, -10, -20]), 7);
        assert_eq!(&c.a[1..], &[1, -2, -1, 2, 1, 2, -2]);
        let c = coefficients(&curve([0, 0, 1, -1, 0]), 40);
        assert_eq!(c.get(37), -1);
    }

    #[test]
    fn root_numbers() {
        assert_eq!(root_number(&curve([0, -1, 1, -10, -20])), Ok(1));
        assert_eq!(root_number(&curve([0, 0, 1, -1, 0])), Ok(-1));
        assert_eq!(root_number(&curve([0, 1, 1, -2, 0])), Ok(1));
    }

    #[test]
    fn e1_values() {
        // mpmath e1 at 40 digits
        let cases = [
            (1.0, 0.219_383_934_395_520_27),
            (0.01, 4.037_929_576_538_114),
            (5.0, 0.001_148_295_591_275_325_8),
            (30.0, 3.021_552_010_688_812_5e-15),
        ];
        for (x, want) in cases {
            let got = exp_integral_e1(x);
            assert!((got - want).abs() <= 1e-14 * want, "E1({x}) = {got}");
        }
        let got = exp_integral_e1(DoubleDouble::from(1.0));
        let want = DoubleDouble::parse_decimal("0.2193839343955202736771637754601216").unwrap();
        assert!((got - want).abs().to_f64() < 1e-30);
    }

    #[test]
    fn values_at_one() {
        let l = l_value_at_1::<f64>(&curve([0, -1, 1, -10, -20]), 1e-12).unwrap();
        assert!((l.value - 0.253_841_860_855_910_7).abs() < 1e-12);
        assert!(l.truncation_error < 1e-12);
        let d = l_derivative_at_1::<f64>(&curve([0, 0, 1, -1, 0]), 1e-12).unwrap();
        assert!((d.value - 0.305_999_773_834_052_3).abs() < 1e-12);
        assert_eq!(l_value_at_1::<f64>(&curve([0, 0, 1, -1, 0]), 1e-8).unwrap_err(), LSeriesError::WrongSign(-1));
        assert_eq!(
            l_derivative_at_1::<f64>(&curve([0, -1, 1, -10, -20]), 1e-8).unwrap_err(),
            LSeriesError::WrongSign(1)
        );
    }

    #[test]
    fn rank_two_is_out_of_range() {
        let r = leading_coefficient::<f64>(&curve([0, 1, 1, -2, 0]), 1e-10);
        assert!(matches!(r, Err(LSeriesError::OrderTooHigh { .. })));
    }

    #[test]
    fn few_terms_for_small_conductor() {
        let m = terms_for(11.0, 1e-6);
        assert!((5..=15).contains(&m), "{m}");
    }
}
