//! Property tests for the bound formulas, the curve arithmetic and the
//! L-series.

use std::sync::OnceLock;
use std::time::Instant;

use bsdlab_core::bounds::{
    analytic_lemma_failures, archimedean_factor_bounds, evaluate, generator_height_bound, leading_coeff_bound_cond,
    sha_bound_naive, sha_bound_szpiro, szpiro_height, BoundsError, BOUND_NAMES,
};
use bsdlab_core::corpus::bundled;
use bsdlab_core::elliptic::height::canonical_height_minimal;
use bsdlab_core::elliptic::periods::archimedean_data;
use bsdlab_core::elliptic::reduction::count_points_naive;
use bsdlab_core::elliptic::torsion::torsion_order_multiple;
use bsdlab_core::elliptic::{Curve, EllipticCurveQ, RationalPoint};
use bsdlab_core::invariants::{
    to_q_invariants, validate, ConstantsConfig, InvariantsError, ValidatedInvariants, VarietyInvariants,
};
use bsdlab_core::lseries::{coefficients, LSeries};
use bsdlab_core::primes::primes_up_to;
use num_bigint::BigUint;
use num_integer::Integer;
use proptest::prelude::*;

fn inv_strategy() -> impl Strategy<Value = VarietyInvariants> {
    (1u32..=3, 1u32..=4, 1u64..=1000, 11u64..=1_000_000, -3.0f64..30.0, 0u32..=6, 0.01f64..1.0).prop_map(
        |(g, d, disc, cond, h, r, eps)| {
            let disc = if d == 1 { 1 } else { disc };
            VarietyInvariants::new(g, d, disc, cond, h, r, eps)
        },
    )
}

fn ok_bounds(inv: &ValidatedInvariants) -> Vec<(&'static str, f64)> {
    let cfg = ConstantsConfig::default();
    BOUND_NAMES
        .iter()
        .filter_map(|n| match evaluate(n, inv, &cfg).unwrap() {
            Ok(r) => Some((*n, r.ln_bound.ln())),
            Err(_) => None,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn validate_is_total(g in 0u32..4, d in 0u32..4, disc in 0u64..100, cond in 0u64..10_000,
                         h in prop_oneof![Just(f64::NAN), -5.0f64..5.0], eps in prop_oneof![Just(0.0), 0.01f64..1.0]) {
        let inv = VarietyInvariants::new(g, d, disc, cond, h, 0, eps);
        match validate(inv.clone()) {
            Ok(v) => prop_assert!(v.q_conductor() > BigUint::from(10u32).pow(g * d)),
            Err(InvariantsError::FontaineViolation { .. }) => {}
            Err(InvariantsError::Invalid(_)) => {
                prop_assert!(g == 0 || d == 0 || disc == 0 || cond == 0 || (d == 1 && disc != 1) || h.is_nan() || eps == 0.0);
            }
            Err(e) => prop_assert!(false, "unexpected {e:?}"),
        }
    }

    #[test]
    fn q_conductor_is_exact(disc in 1u64..=u64::MAX / 2, cond in 1u64..=u64::MAX / 2, g in 1u32..4) {
        let v = ValidatedInvariants::new_unchecked(VarietyInvariants::new(g, 2, disc, cond, 1.0, 0, 0.5)).unwrap();
        let q = to_q_invariants(&v);
        prop_assert_eq!(q.n, BigUint::from(cond) * BigUint::from(disc).pow(2 * g));
    }

    #[test]
    fn bounds_grow_with_conductor_and_discriminant(inv in inv_strategy(), k in 2u64..50) {
        let Ok(base) = validate(inv.clone()) else { return Ok(()) };
        let bigger_f = validate(VarietyInvariants { cond: inv.cond * k, ..inv.clone() }).unwrap();
        let mut steps = vec![bigger_f];
        if inv.d > 1 {
            steps.push(validate(VarietyInvariants { disc: inv.disc * k, ..inv.clone() }).unwrap());
        }
        let before = ok_bounds(&base);
        for s in steps {
            for ((n, a), (m, b)) in before.iter().zip(ok_bounds(&s)) {
                prop_assert_eq!(*n, m);
                prop_assert!(b >= *a - 1e-9 * a.abs(), "{n}: {a} -> {b}");
            }
        }
    }

    #[test]
    fn rank_increments(inv in inv_strategy()) {
        let Ok(v) = validate(inv) else { return Ok(()) };
        let d = leading_coeff_bound_cond(&v.with_rank(v.rank + 1)).ln() - leading_coeff_bound_cond(&v).ln();
        prop_assert!((d - std::f64::consts::LN_2).abs() < 1e-9);
        let cfg = ConstantsConfig { masser_c: 0.3, ..ConstantsConfig::default() };
        let r = v.rank.max(1);
        let lo = generator_height_bound(&v.with_rank(r), &cfg).unwrap().ln_bound.ln();
        let hi = generator_height_bound(&v.with_rank(r + 1), &cfg).unwrap().ln_bound.ln();
        let g = v.g as f64;
        let want = std::f64::consts::LN_2 + 4.0 * ((r + 1) as f64).ln() - cfg.masser_c.ln()
            + (2.0 * g + 1.0) * v.h_plus().ln();
        prop_assert!((hi - lo - want).abs() < 1e-9 * hi.abs().max(1.0));
    }

    #[test]
    fn szpiro_is_naive_at_the_substitute(inv in inv_strategy()) {
        let Ok(v) = validate(inv) else { return Ok(()) };
        let cfg = ConstantsConfig::default();
        match sha_bound_szpiro(&v, &cfg) {
            Ok(s) => {
                let n = sha_bound_naive(&v.with_faltings(szpiro_height(&v, &cfg)), &cfg).unwrap();
                prop_assert_eq!(s.ln_bound.ln().to_bits(), n.ln_bound.ln().to_bits());
            }
            Err(BoundsError::DegenerateInput(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn archimedean_sandwich_is_ordered(inv in inv_strategy()) {
        let Ok(v) = validate(inv) else { return Ok(()) };
        let (lo, hi) = archimedean_factor_bounds(&v, &ConstantsConfig::default());
        prop_assert!(lo <= hi);
    }
}

#[test]
fn analytic_lemma_sweep() {
    let t = Instant::now();
    assert_eq!(analytic_lemma_failures(20_000), [1]);
    assert!(t.elapsed().as_secs_f64() < 1.0, "{:?}", t.elapsed());
}

struct CorpusData {
    curves: Vec<Curve>,
    coeffs: Vec<Vec<i64>>,
}

const N_MAX: usize = 10_000;

fn corpus_data() -> &'static CorpusData {
    static DATA: OnceLock<CorpusData> = OnceLock::new();
    DATA.get_or_init(|| {
        let curves: Vec<Curve> = bundled().iter().map(|e| e.curve()).collect();
        let coeffs = curves.iter().map(|c| coefficients(c, N_MAX).a).collect();
        CorpusData { curves, coeffs }
    })
}

#[test]
fn hasse_bound_on_corpus() {
    let data = corpus_data();
    let primes = primes_up_to(N_MAX as u64);
    for (c, a) in data.curves.iter().zip(&data.coeffs) {
        for &p in &primes {
            let ap = a[p as usize];
            assert!((ap * ap) as u64 <= 4 * p, "{} at {p}: a_p = {ap}", c.input_model());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn hasse_and_multiplicativity(i in 0usize..64, pi in 0usize..1229, m in 1usize..=N_MAX, n in 1usize..=N_MAX) {
        let data = corpus_data();
        let i = i % data.curves.len();
        let a = &data.coeffs[i];
        let p = primes_up_to(N_MAX as u64)[pi.min(1228)] as usize;
        prop_assert!(a[p] * a[p] <= 4 * p as i64);
        let n = n.min(N_MAX / m);
        if m.gcd(&n) == 1 {
            prop_assert_eq!(a[m * n], a[m] * a[n], "m = {}, n = {}", m, n);
        }
    }
}

#[test]
fn truncation_error_is_honest() {
    for c in &corpus_data().curves {
        let Ok(l) = LSeries::new(c, 1e-6) else { continue };
        let eps = l.root_number().unwrap();
        for m in [10usize, 40, 160] {
            let ((v1, e1), (v2, _)) = if eps == 1 {
                (l.l1_truncated::<f64>(m), l.l1_truncated::<f64>(2 * m))
            } else {
                (l.l1_derivative_truncated::<f64>(m), l.l1_derivative_truncated::<f64>(2 * m))
            };
            assert!((v1 - v2).abs() <= e1, "{} m = {m}: moved {} with error {e1}", c.input_model(), (v1 - v2).abs());
        }
    }
}

#[test]
fn torsion_divides_point_counts() {
    for c in &corpus_data().curves {
        let e = c.minimal_model();
        let t = c.torsion();
        let n = t.order() as u64;
        assert!(n <= 12);
        assert_eq!(t.points.len() as u64, n);
        // exact orders in the group law
        for p in &t.points {
            let k = e.order_up_to(p, 12).expect("torsion point of order <= 12");
            assert_eq!(n % k, 0);
        }
        let good: Vec<u64> = primes_up_to(100).into_iter().filter(|&p| c.is_good(p)).collect();
        for &p in &good {
            // 2-power torsion need not inject at p = 2
            let m = if p == 2 { n >> n.trailing_zeros() } else { n };
            assert_eq!(count_points_naive(e, p) % m, 0, "{} at {p}", c.input_model());
        }
        // two odd good primes already pin a multiple of the order
        let odd: Vec<u64> = good.iter().copied().filter(|&p| p > 2).take(2).collect();
        let two_prime = count_points_naive(e, odd[0]).gcd(&count_points_naive(e, odd[1]));
        assert_eq!(two_prime % n, 0);
        assert_eq!(torsion_order_multiple(e, 100) % n, 0);
    }
}

#[test]
fn lattice_covolume() {
    for c in &corpus_data().curves {
        let a = archimedean_data::<f64>(c.minimal_model());
        let covolume = (a.w1.conj() * a.w2).im.abs();
        let eta = a.omega_lattice * a.tau_real.im.sqrt();
        assert!((eta * eta - covolume).abs() < 1e-10 * covolume);
    }
}

fn height(e: &EllipticCurveQ, p: &RationalPoint) -> f64 {
    canonical_height_minimal::<f64>(e, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parallelogram_law(j in 0usize..3, k in -3i64..=3, l in -3i64..=3) {
        let (a, gens) = [
            ([0, 1, 1, -2, 0], [RationalPoint::from_ints(0, 0), RationalPoint::from_ints(1, 0)]),
            ([1, 0, 0, 0, 1], [RationalPoint::from_ints(0, 1), RationalPoint::from_ints(-1, 1)]),
            ([0, 0, 1, -7, 6], [RationalPoint::from_ints(1, 0), RationalPoint::from_ints(0, 2)]),
        ][j].clone();
        let e = EllipticCurveQ::from_i64(a).unwrap();
        let p = e.mul(&gens[0], k.max(1));
        let q = e.mul(&gens[1], l);
        let lhs = height(&e, &e.add(&p, &q)) + height(&e, &e.sub(&p, &q));
        let rhs = 2.0 * height(&e, &p) + 2.0 * height(&e, &q);
        prop_assert!((lhs - rhs).abs() < 1e-8 * rhs.max(1.0));
        let h2 = height(&e, &e.double(&p));
        prop_assert!((h2 - 4.0 * height(&e, &p)).abs() < 1e-8 * h2.max(1.0));
    }
}
