//! Generator search on the corpus and the successive-minima certificate.

use std::collections::BTreeSet;
use std::time::Instant;

use bsdlab_core::corpus::bundled;
use bsdlab_core::elliptic::height::canonical_height_minimal;
use bsdlab_core::elliptic::{Curve, EllipticCurveQ, RationalPoint};
use bsdlab_core::invariants::ConstantsConfig;
use bsdlab_core::mwsearch::{extract_basis, manin_procedure, search_points, ManinOptions, SearchError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn minimal_gens(c: &Curve, gens: &[RationalPoint]) -> Vec<RationalPoint> {
    gens.iter().map(|p| c.to_minimal_point(p).unwrap()).collect()
}

#[test]
fn manin_end_to_end() {
    let start = Instant::now();
    let cfg = ConstantsConfig::default();
    let e = Curve::from_coefficients([0, 0, 1, -1, 0]).unwrap();
    let (b, c) = manin_procedure(&e, &cfg, &ManinOptions::default()).unwrap();
    assert_eq!(b.points, [RationalPoint::from_ints(0, 0)]);
    assert!((c.cutoff_canonical_ln_unit_height.unwrap() - 10.299_648_715_447).abs() < 1e-9);
    assert!((c.cutoff_canonical_ln.unwrap() - 8.303_106_507_81).abs() < 1e-9);
    assert!(!c.exhaustive && c.points_scanned == 10_000_000);
    assert!(c.naive_height_reached > 10.0);
    assert!(c.minkowski_holds());
    assert!((c.minkowski_lhs - c.minkowski_rhs).abs() < 1e-10 * c.minkowski_rhs);
    assert!((b.regulator - 0.051_111_408_239_968_84).abs() < 1e-14);

    let e = Curve::from_coefficients([0, -1, 1, -10, -20]).unwrap();
    let (b, c) = manin_procedure(&e, &cfg, &ManinOptions::default()).unwrap();
    assert!(b.points.is_empty() && b.regulator == 1.0);
    assert!(c.exhaustive && c.points_scanned > 0);
    assert_eq!(c.points_found, 2, "x = 5 and x = 16, the torsion");
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn infeasible_cutoff_is_reported() {
    let e = Curve::from_coefficients([0, 1, 1, -2, 0]).unwrap();
    let opts = ManinOptions { rank: Some(2), budget: 1, cutoff_override: None };
    let err = manin_procedure(&e, &ConstantsConfig::default(), &opts).unwrap_err();
    assert!(matches!(err, SearchError::CutoffInfeasible { budget: 1, expected: 2, .. }), "{err}");
    let opts = ManinOptions { rank: None, ..ManinOptions::default() };
    assert_eq!(manin_procedure(&e, &ConstantsConfig::default(), &opts).unwrap_err(), SearchError::RankRequired);
}

#[test]
fn search_misses_nothing_below_cutoff() {
    // brute force over x = m/n with |m|, n <= e^4 through lift_x
    let e = EllipticCurveQ::from_i64([0, 0, 1, -1, 0]).unwrap();
    let bound = 4.0f64.exp() as i64;
    let mut brute = BTreeSet::new();
    for n in 1..=bound {
        for m in -bound..=bound {
            let x = BigRational::new(m.into(), n.into());
            let h = x.numer().magnitude().max(x.denom().magnitude()).clone();
            if h > 7u32.into() || e.lift_x(&x).is_none() {
                continue;
            }
            brute.insert(x);
        }
    }
    let found: BTreeSet<BigRational> = search_points(&e, 2.0).iter().map(|p| p.x().unwrap().clone()).collect();
    assert_eq!(found, brute);
}

#[test]
fn successive_minima_on_known_generators() {
    for entry in bundled() {
        let gens = entry.generators();
        if gens.is_empty() {
            continue;
        }
        let c = entry.curve();
        let e_min = c.minimal_model();
        let pts = minimal_gens(&c, gens);
        let b = extract_basis(e_min, &pts, pts.len()).unwrap();
        let (lhs, rhs) = b.minkowski_sides();
        assert!(lhs <= rhs, "{}: {lhs} > {rhs}", entry.label);
        if pts.len() == 1 {
            assert!((lhs - rhs).abs() < 1e-10 * rhs, "{}", entry.label);
        }
        // as given, before reduction
        let raw: f64 = pts.iter().map(|p| canonical_height_minimal::<f64>(e_min, p)).product();
        assert!(raw <= rhs * (1.0 + 1e-12), "{}: unreduced {raw} > {rhs}", entry.label);
        for w in b.heights_sorted.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}

#[test]
fn searched_bases_match_known_regulators() {
    let cfg = ConstantsConfig::default();
    let masser_c = bundled()
        .iter()
        .flat_map(|e| {
            let c = e.curve();
            minimal_gens(&c, e.generators())
                .iter()
                .map(|p| canonical_height_minimal::<f64>(c.minimal_model(), p))
                .collect::<Vec<_>>()
        })
        .fold(f64::INFINITY, f64::min);
    for entry in bundled() {
        let rank = entry.known_rank.unwrap();
        let c = entry.curve();
        let opts = ManinOptions { rank: Some(rank), budget: 200_000, cutoff_override: None };
        let (b, cert) = manin_procedure(&c, &cfg, &opts).unwrap_or_else(|e| panic!("{}: {e}", entry.label));
        assert_eq!(b.rank(), rank as usize);
        assert!(cert.minkowski_holds());
        let known = extract_basis(c.minimal_model(), &minimal_gens(&c, entry.generators()), rank as usize).unwrap();
        assert!((b.regulator - known.regulator).abs() < 1e-9 * known.regulator, "{}", entry.label);
        // every h_plus is 1 on this corpus
        for h in &b.heights_sorted {
            assert!(*h >= masser_c * (1.0 - 1e-12), "{}: {h} below {masser_c}", entry.label);
        }
    }
}

fn unimodular(ops: &[(usize, usize, i64)], r: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    for &(i, j, k) in ops {
        let (i, j) = (i % r, j % r);
        if i == j {
            u.swap(i, (i + 1) % r);
            continue;
        }
        let row = u[j].clone();
        for (a, b) in u[i].iter_mut().zip(row) {
            *a += k * b;
        }
    }
    u
}

fn combine(e: &EllipticCurveQ, row: &[i64], pts: &[RationalPoint]) -> RationalPoint {
    row.iter().zip(pts).fold(RationalPoint::Infinity, |acc, (&k, p)| e.add(&acc, &e.mul(p, k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn regulator_is_invariant(ops in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 1..5), which in 0usize..2) {
        let (a, gens) = if which == 0 {
            ([0, 1, 1, -2, 0], vec![RationalPoint::from_ints(0, 0), RationalPoint::from_ints(1, 0)])
        } else {
            ([0, 0, 1, -7, 6], vec![
                RationalPoint::from_ints(1, 0), RationalPoint::from_ints(2, 0), RationalPoint::from_ints(0, 2),
            ])
        };
        let e = EllipticCurveQ::from_i64(a).unwrap();
        let r = gens.len();
        let base = extract_basis(&e, &gens, r).unwrap();
        let u = unimodular(&ops, r);
        let moved: Vec<RationalPoint> = u.iter().map(|row| combine(&e, row, &gens)).collect();
        let b = extract_basis(&e, &moved, r).unwrap();
        prop_assert!((b.regulator - base.regulator).abs() < 1e-9 * base.regulator);
        let (lhs, rhs) = b.minkowski_sides();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn larger_cutoff_finds_a_superset(a1 in -1i64..=1, a2 in -1i64..=1, a3 in -1i64..=1, a4 in -20i64..=20,
                                      a6 in -20i64..=20, c in 0.0f64..4.0) {
        let Ok(e) = EllipticCurveQ::from_i64([a1, a2, a3, a4, a6]) else { return Ok(()) };
        let xs = |cut: f64| -> BTreeSet<BigRational> {
            search_points(&e, cut).iter().map(|p| p.x().unwrap().clone()).collect()
        };
        let small = xs(c);
        let big = xs(c + 1.0);
        prop_assert!(small.is_subset(&big));
        for p in search_points(&e, c) {
            prop_assert!(e.contains(&p));
            let x = p.x().unwrap();
            let h = x.numer().magnitude().max(x.denom().magnitude()).clone();
            prop_assert!(!x.denom().is_zero() && h <= BigInt::from(c.exp().floor() as i64).magnitude().clone());
        }
    }
}
