//! Search for rational points by naive height, extraction of an independent
//! basis, and the successive-minima certificate for it.
//!
//! Points `x = m/e^2` are enumerated level by level in `H = max(|m|, e^2)`,
//! so a search stopped by its budget is still complete up to the last
//! finished level.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::bounds::{generator_height_bound, ln_factorial, BoundReport};
use crate::bsdcheck::{curve_invariants, BsdError};
use crate::elliptic::height::{
    canonical_height_minimal, cholesky, determinant, gram_matrix_minimal, height_difference_bounds, TORSION_HEIGHT,
};
use crate::elliptic::{Curve, EllipticCurveQ, RationalPoint};
use crate::invariants::ConstantsConfig;
use crate::lseries::{leading_coefficient, LSeriesError};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Relative determinant threshold below which points count as dependent.
const DEPENDENCE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SearchError {
    #[error("found {found} independent points, expected {expected}")]
    InsufficientPoints { found: usize, expected: usize },
    #[error(
        "naive cutoff {cutoff_naive:.3} not reached within {budget} candidates \
         and only {found} of {expected} independent points found"
    )]
    CutoffInfeasible { cutoff_naive: f64, budget: u64, found: usize, expected: usize },
    #[error("analytic order at least 2; supply the rank")]
    RankRequired,
    #[error("negative height cutoff")]
    NegativeCutoff,
    #[error(transparent)]
    Bsd(#[from] BsdError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// One point per `x`; the other point with that `x` is its negative.
    pub points: Vec<RationalPoint>,
    pub candidates: u64,
    /// Largest `H` such that every level up to `H` was scanned.
    pub complete_to: u64,
    /// Whether every level up to the cutoff was scanned.
    pub exhaustive: bool,
}

impl SearchOutcome {
    /// `ln complete_to`: every point of naive height at most this was found.
    pub fn naive_height_reached(&self) -> f64 {
        (self.complete_to.max(1) as f64).ln()
    }
}

static SQUARE_MOD_64: [bool; 64] = residues::<64>();
static SQUARE_MOD_63: [bool; 63] = residues::<63>();
static SQUARE_MOD_65: [bool; 65] = residues::<65>();
static SQUARE_MOD_11: [bool; 11] = residues::<11>();

const fn residues<const N: usize>() -> [bool; N] {
    let mut t = [false; N];
    let mut i = 0;
    while i < N {
        t[(i * i) % N] = true;
        i += 1;
    }
    t
}

fn square_root_u128(q: u128) -> Option<u128> {
    if !SQUARE_MOD_64[(q % 64) as usize]
        || !SQUARE_MOD_63[(q % 63) as usize]
        || !SQUARE_MOD_65[(q % 65) as usize]
        || !SQUARE_MOD_11[(q % 11) as usize]
    {
        return None;
    }
    let s = q.sqrt();
    (s * s == q).then_some(s)
}

/// Tests one `x = m/e^2` with `gcd(m, e) = 1`.
struct Lifter<'a> {
    e: &'a EllipticCurveQ,
    small: Option<[i128; 5]>,
}

impl<'a> Lifter<'a> {
    fn new(e: &'a EllipticCurveQ) -> Self {
        let small = e.a_invariants().iter().map(|a| a.to_i64().map(i128::from)).collect::<Option<Vec<_>>>();
        Lifter { e, small: small.map(|v| [v[0], v[1], v[2], v[3], v[4]]) }
    }

    // Q = e^2 (a1 m + a3 e^2)^2 + 4 (m^3 + a2 m^2 e^2 + a4 m e^4 + a6 e^6);
    // x = m/e^2 lifts iff Q is a square, and then
    // y = (-(a1 m + a3 e^2) e + sqrt Q) / (2 e^3).
    fn small_q(&self, m: i64, d: i64) -> Option<(i128, i128)> {
        let [a1, a2, a3, a4, a6] = self.small?;
        let (m, d) = (m as i128, d as i128);
        let d2 = d.checked_mul(d)?;
        let d4 = d2.checked_mul(d2)?;
        let d6 = d4.checked_mul(d2)?;
        let lin = a1.checked_mul(m)?.checked_add(a3.checked_mul(d2)?)?;
        let m2 = m.checked_mul(m)?;
        let cubic = m2
            .checked_mul(m)?
            .checked_add(a2.checked_mul(m2)?.checked_mul(d2)?)?
            .checked_add(a4.checked_mul(m)?.checked_mul(d4)?)?
            .checked_add(a6.checked_mul(d6)?)?;
        let ld = lin.checked_mul(d)?;
        let q = ld.checked_mul(ld)?.checked_add(cubic.checked_mul(4)?)?;
        Some((q, lin))
    }

    fn point(&self, m: i64, d: i64) -> Option<RationalPoint> {
        let (q, lin): (BigInt, BigInt) = match self.small_q(m, d) {
            Some((q, lin)) => {
                if q < 0 {
                    return None;
                }
                let s = square_root_u128(q as u128)?;
                (BigInt::from(s), BigInt::from(lin))
            }
            None => {
                let [a1, a2, a3, a4, a6] = self.e.a_invariants();
                let (m, d) = (BigInt::from(m), BigInt::from(d));
                let d2 = &d * &d;
                let lin: BigInt = a1 * &m + a3 * &d2;
                let ld = &lin * &d;
                let q: BigInt =
                    &ld * &ld + 4 * (&m * &m * &m + a2 * &m * &m * &d2 + a4 * &m * &d2 * &d2 + a6 * &d2 * &d2 * &d2);
                if q.is_negative() {
                    return None;
                }
                let s = q.sqrt();
                if &s * &s != q {
                    return None;
                }
                (s, lin)
            }
        };
        let d = BigInt::from(d);
        let d2 = &d * &d;
        let x = BigRational::new(BigInt::from(m), d2.clone());
        let y = BigRational::new(-(&lin * &d) + q, 2 * &d2 * &d);
        let p = RationalPoint::new(x, y);
        debug_assert!(self.e.contains(&p));
        Some(p)
    }
}

/// Every affine point with naive height `ln max(|m|, e^2) <= cutoff`, one per
/// `x`, scanning at most `budget` coprime pairs `(m, e)`.
pub fn search_points_budgeted(e: &EllipticCurveQ, cutoff: f64, budget: u64) -> Result<SearchOutcome, SearchError> {
    if cutoff.is_nan() || cutoff < 0.0 {
        return Err(SearchError::NegativeCutoff);
    }
    let target = if cutoff >= 43.0 { u64::MAX } else { (libm::exp(cutoff) * (1.0 + 1e-12)).floor() as u64 };
    let lifter = Lifter::new(e);
    let mut points = Vec::new();
    let mut candidates = 0u64;
    let mut complete_to = 0u64;
    let mut try_pair = |m: i64, d: i64, points: &mut Vec<RationalPoint>| -> bool {
        if candidates >= budget {
            return false;
        }
        candidates += 1;
        if let Some(p) = lifter.point(m, d) {
            points.push(p);
        }
        true
    };
    'levels: for h in 1..=target {
        let Ok(hi) = i64::try_from(h) else { break };
        let r = h.sqrt();
        if r * r == h {
            // e^2 = H, |m| <= H
            let d = r as i64;
            for m in -hi..=hi {
                if m.gcd(&d) == 1 && !try_pair(m, d, &mut points) {
                    break 'levels;
                }
            }
        }
        // |m| = H, e^2 < H
        let mut d = 1i64;
        while ((d * d) as u64) < h {
            if hi.gcd(&d) == 1 && (!try_pair(hi, d, &mut points) || !try_pair(-hi, d, &mut points)) {
                break 'levels;
            }
            d += 1;
        }
        complete_to = h;
    }
    Ok(SearchOutcome { points, candidates, complete_to, exhaustive: complete_to == target })
}

/// Affine points with naive height at most `cutoff`, deduplicated up to sign.
pub fn search_points(e: &EllipticCurveQ, cutoff: f64) -> Vec<RationalPoint> {
    search_points_budgeted(e, cutoff, u64::MAX).map(|o| o.points).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MWBasis {
    /// Points on the minimal model, in order of increasing height.
    pub points: Vec<RationalPoint>,
    pub gram: Vec<Vec<f64>>,
    /// `det gram`; 1 for the empty basis.
    pub regulator: f64,
    pub heights_sorted: Vec<f64>,
}

impl MWBasis {
    pub fn rank(&self) -> usize {
        self.points.len()
    }

    /// `prod h^(P_i)` and `(r!)^4 Reg`.
    pub fn minkowski_sides(&self) -> (f64, f64) {
        let lhs = self.heights_sorted.iter().product();
        let rhs = libm::exp(4.0 * ln_factorial(self.rank() as u32)) * self.regulator;
        (lhs, rhs)
    }
}

// Gram-Schmidt data (mu, B) of a Gram matrix.
fn gram_schmidt(g: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j];
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i];
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * b[l];
        }
        b[i] = s;
    }
    (mu, b)
}

fn transformed_gram(g0: &[Vec<f64>], u: &[Vec<i64>]) -> Vec<Vec<f64>> {
    let n = g0.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                for l in 0..n {
                    s += u[i][k] as f64 * g0[k][l] * u[j][l] as f64;
                }
            }
            g[i][j] = s;
        }
    }
    g
}

/// LLL on a positive definite Gram matrix. Returns `U` with the reduced
/// basis `b'_i = sum_j U[i][j] b_j`.
pub fn lll_gram(g0: &[Vec<f64>], delta: f64) -> Vec<Vec<i64>> {
    let n = g0.len();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut k = 1;
    let mut steps = 0;
    while k < n && steps < 10_000 {
        steps += 1;
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&transformed_gram(g0, &u));
            let q = libm::round(mu[k][j]) as i64;
            if q != 0 {
                for c in 0..n {
                    u[k][c] -= q * u[j][c];
                }
            }
        }
        let (mu, b) = gram_schmidt(&transformed_gram(g0, &u));
        if b[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    u
}

fn combine(e: &EllipticCurveQ, coeffs: &[i64], points: &[RationalPoint]) -> RationalPoint {
    coeffs
        .iter()
        .zip(points)
        .fold(RationalPoint::Infinity, |acc, (&c, p)| if c == 0 { acc } else { e.add(&acc, &e.mul(p, c)) })
}

fn basis_from(e_min: &EllipticCurveQ, mut points: Vec<RationalPoint>) -> MWBasis {
    let mut heights: Vec<f64> = points.iter().map(|p| canonical_height_minimal::<f64>(e_min, p)).collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| heights[a].total_cmp(&heights[b]));
    points = order.iter().map(|&i| points[i].clone()).collect();
    heights = order.iter().map(|&i| heights[i]).collect();
    let gram = gram_matrix_minimal::<f64>(e_min, &points);
    let regulator = determinant(&gram);
    MWBasis { points, gram, regulator, heights_sorted: heights }
}

/// Drops torsion and duplicates, picks independent points greedily by height
/// and LLL-reduces them. Points are on `e_min`, which must be the model the
/// heights refer to.
pub fn extract_basis(
    e_min: &EllipticCurveQ,
    points: &[RationalPoint],
    r_expected: usize,
) -> Result<MWBasis, SearchError> {
    let mut cands: Vec<(f64, RationalPoint)> = Vec::new();
    for p in points {
        if p.is_infinity() || cands.iter().any(|(_, q)| q.x() == p.x()) {
            continue;
        }
        let h = canonical_height_minimal::<f64>(e_min, p);
        if h >= TORSION_HEIGHT {
            cands.push((h, p.clone()));
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut chosen: Vec<RationalPoint> = Vec::new();
    let mut chosen_heights: Vec<f64> = Vec::new();
    for (h, p) in cands {
        if chosen.len() == r_expected {
            break;
        }
        chosen.push(p);
        chosen_heights.push(h);
        let det = determinant(&gram_matrix_minimal::<f64>(e_min, &chosen));
        let scale: f64 = chosen_heights.iter().product();
        if det <= DEPENDENCE_TOLERANCE * scale {
            chosen.pop();
            chosen_heights.pop();
        }
    }
    if chosen.len() < r_expected {
        return Err(SearchError::InsufficientPoints { found: chosen.len(), expected: r_expected });
    }
    let gram = gram_matrix_minimal::<f64>(e_min, &chosen);
    let u = lll_gram(&gram, 0.99);
    let reduced: Vec<RationalPoint> = u.iter().map(|row| combine(e_min, row, &chosen)).collect();
    let basis = basis_from(e_min, reduced);
    debug_assert!(basis.rank() == 0 || cholesky(&basis.gram).is_some());
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManinOptions {
    /// Rank to search for; taken from the analytic order when absent.
    pub rank: Option<u32>,
    pub budget: u64,
    /// Replaces the naive cutoff derived from the generator bound.
    pub cutoff_override: Option<f64>,
}

impl Default for ManinOptions {
    fn default() -> Self {
        ManinOptions { rank: None, budget: DEFAULT_BUDGET, cutoff_override: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchCertificate {
    pub rank: u32,
    /// `ln` of the bound on `h^(P_r)` at the curve's own `(F, h, r)`; absent
    /// at rank 0, where the canonical cutoff is 0.
    pub cutoff_canonical_ln: Option<f64>,
    /// The same bound evaluated at `h = 1`.
    pub cutoff_canonical_ln_unit_height: Option<f64>,
    /// Bound on `h^(P_r)` itself, possibly `inf`.
    pub cutoff_canonical: f64,
    /// `(lower, upper)` with `lower <= h^ - h <= upper` on the minimal model.
    pub height_difference: (f64, f64),
    pub cutoff_naive: f64,
    pub naive_height_reached: f64,
    pub points_scanned: u64,
    pub points_found: usize,
    pub exhaustive: bool,
    pub minkowski_lhs: f64,
    pub minkowski_rhs: f64,
    pub bound: Option<BoundReport>,
}

impl SearchCertificate {
    pub fn minkowski_holds(&self) -> bool {
        self.minkowski_lhs <= self.minkowski_rhs * (1.0 + 1e-12)
    }
}

/// Bound-driven search for a basis of the free part. When the naive cutoff
/// is beyond the budget, the search still succeeds if it finds `rank`
/// independent points, with `exhaustive = false` in the certificate.
pub fn manin_procedure(
    curve: &Curve,
    constants: &ConstantsConfig,
    opts: &ManinOptions,
) -> Result<(MWBasis, SearchCertificate), SearchError> {
    let rank = match opts.rank {
        Some(r) => r,
        None => match leading_coefficient::<f64>(curve, 1e-10) {
            Ok(lc) => lc.analytic_order,
            Err(LSeriesError::OrderTooHigh { .. }) => return Err(SearchError::RankRequired),
            Err(e) => return Err(BsdError::from(e).into()),
        },
    };
    let e_min = curve.minimal_model();
    let diff = height_difference_bounds(e_min);
    let (ln_bound, ln_unit, bound) = if rank == 0 {
        (None, None, None)
    } else {
        let inv = curve_invariants(curve, rank)?;
        let rep = generator_height_bound(&inv, constants).map_err(BsdError::from)?;
        let unit = generator_height_bound(&inv.with_faltings(1.0), constants).map_err(BsdError::from)?;
        (Some(rep.ln_bound.ln()), Some(unit.ln_bound.ln()), Some(rep))
    };
    let cutoff_canonical = ln_bound.map_or(0.0, libm::exp);
    let cutoff_naive = opts.cutoff_override.unwrap_or(cutoff_canonical - diff.0);
    let outcome = search_points_budgeted(e_min, cutoff_naive, opts.budget)?;
    let basis = match extract_basis(e_min, &outcome.points, rank as usize) {
        Ok(b) => b,
        Err(SearchError::InsufficientPoints { found, expected }) if !outcome.exhaustive => {
            return Err(SearchError::CutoffInfeasible { cutoff_naive, budget: opts.budget, found, expected })
        }
        Err(e) => return Err(e),
    };
    let (minkowski_lhs, minkowski_rhs) = basis.minkowski_sides();
    let cert = SearchCertificate {
        rank,
        cutoff_canonical_ln: ln_bound,
        cutoff_canonical_ln_unit_height: ln_unit,
        cutoff_canonical,
        height_difference: diff,
        cutoff_naive,
        naive_height_reached: outcome.naive_height_reached(),
        points_scanned: outcome.candidates,
        points_found: outcome.points.len(),
        exhaustive: outcome.exhaustive,
        minkowski_lhs,
        minkowski_rhs,
        bound,
    };
    assert!(cert.minkowski_holds(), "successive minima inequality violated: {minkowski_lhs} > {minkowski_rhs}");
    Ok((basis, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};
    use num_traits::Zero;

    fn curve(a: [i64; 5]) -> EllipticCurveQ {
        EllipticCurveQ::from_i64(a).unwrap()
    }

    fn xs(points: &[RationalPoint]) -> Vec<String> {
        let mut v: Vec<String> = points.iter().map(|p| p.x().unwrap().to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn small_searches() {
        // ellratpoints(E, 7) in PARI
        assert_eq!(xs(&search_points(&curve([0, 0, 1, -1, 0]), 2.0)), ["-1", "0", "1", "1/4", "2", "6"]);
        assert_eq!(xs(&search_points(&curve([0, -1, 1, -10, -20]), 3.0)), ["16", "5"]);
        let zero = search_points(&curve([0, 0, 1, -1, 0]), 0.0);
        assert!(zero
            .iter()
            .all(|p| p.x().unwrap().denom() == &BigInt::from(1) && p.x().unwrap().numer().abs() <= BigInt::from(1)));
    }

    #[test]
    fn budget_stops_at_a_level() {
        let e = curve([0, 0, 1, -1, 0]);
        let o = search_points_budgeted(&e, 10.0, 50).unwrap();
        assert_eq!(o.candidates, 50);
        assert!(!o.exhaustive);
        let full = search_points_budgeted(&e, (o.complete_to as f64).ln(), u64::MAX).unwrap();
        assert!(full.exhaustive);
        assert!(xs(&full.points).iter().all(|x| xs(&o.points).contains(x)));
    }

    #[test]
    fn big_coefficients_take_the_slow_path() {
        // y^2 = x^3 + 2^160 has (0, 2^80)
        let a6 = BigInt::from(1u128 << 80) * BigInt::from(1u128 << 80);
        let e = EllipticCurveQ::new([BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero(), a6]).unwrap();
        let p = search_points(&e, 0.0);
        assert!(p.iter().any(|p| p.x().unwrap().is_zero()));
    }

    #[test]
    fn basis_of_37a1() {
        let e = curve([0, 0, 1, -1, 0]);
        let pts = search_points(&e, 2.0);
        let b = extract_basis(&e, &pts, 1).unwrap();
        assert_eq!(b.points.len(), 1);
        assert_eq!(b.points[0].x(), Some(&BigRational::from_integer(0.into())));
        assert!((b.regulator - 0.051_111_408_239_968_84).abs() < 1e-14);
        let mut doubled = pts.clone();
        doubled.extend(pts.iter().cloned());
        assert_eq!(extract_basis(&e, &doubled, 1).unwrap(), b);
        assert_eq!(extract_basis(&e, &pts, 2), Err(SearchError::InsufficientPoints { found: 1, expected: 2 }));
    }

    #[test]
    fn empty_basis() {
        let e = curve([0, -1, 1, -10, -20]);
        let b = extract_basis(&e, &search_points(&e, 3.0), 0).unwrap();
        assert_eq!((b.rank(), b.regulator), (0, 1.0));
        assert_eq!(b.minkowski_sides(), (1.0, 1.0));
    }

    #[test]
    fn lll_reduces_a_skewed_basis() {
        // basis (1,0), (5,1) of Z^2
        let g = vec![vec![1.0, 5.0], vec![5.0, 26.0]];
        let u = lll_gram(&g, 0.99);
        let r = transformed_gram(&g, &u);
        assert!((r[0][0] - 1.0).abs() < 1e-12 && (r[1][1] - 1.0).abs() < 1e-12);
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        assert_eq!(det.abs(), 1);
    }
}
