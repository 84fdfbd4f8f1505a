//! One line per acceptance criterion; exits nonzero if any fails.

use std::time::Instant;

use bsdlab_core::bounds::{
    analytic_lemma_failures, generator_height_bound, leading_coeff_bound_cond, leading_coeff_bound_rank,
    sha_bound_szpiro, sha_reg_bound_general, torsion_bound_elliptic,
};
use bsdlab_core::bsdcheck::{archimedean_factor_from_height, assemble, curve_invariants};
use bsdlab_core::corpus::bundled;
use bsdlab_core::elliptic::height::canonical_height_minimal;
use bsdlab_core::elliptic::periods::archimedean_data;
use bsdlab_core::elliptic::reduction::count_points_naive;
use bsdlab_core::elliptic::torsion::torsion_order_multiple;
use bsdlab_core::elliptic::{Curve, RationalPoint};
use bsdlab_core::invariants::{validate, ConstantsConfig, VarietyInvariants};
use bsdlab_core::lseries::{coefficients, leading_coefficient};
use bsdlab_core::mwsearch::{extract_basis, manin_procedure, ManinOptions};
use bsdlab_core::primes::primes_up_to;
use num_bigint::BigUint;
use proptest::prelude::RngCore;
use proptest::test_runner::{RngAlgorithm, TestRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

fn rank0() -> Outcome {
    let t = Instant::now();
    let c = Curve::from_coefficients([0, -1, 1, -10, -20]).unwrap();
    ensure(*c.conductor() == BigUint::from(11u32), "conductor")?;
    ensure(c.local_data_at(11).map(|l| l.c_p) == Some(5), "c_11")?;
    ensure(c.torsion().order() == 5, "torsion")?;
    let omega = archimedean_data::<f64>(c.minimal_model()).c_infty;
    ensure(close(omega, 1.269_209_304_279_55, 1e-10), format!("omega {omega}"))?;
    let l = leading_coefficient::<f64>(&c, 1e-14).map_err(|e| e.to_string())?;
    ensure(close(l.value, 0.253_841_860_855_911, 1e-10), format!("L(1) {}", l.value))?;
    let terms = assemble::<f64>(&c, &[], None, 1e-14).map_err(|e| e.to_string())?;
    let dt = t.elapsed().as_secs_f64();
    ensure((terms.sha_predicted - 1.0).abs() < 1e-6, format!("sha {}", terms.sha_predicted))?;
    ensure(dt < 1.0, format!("took {dt:.3} s"))?;
    Ok(format!("11a1 sha = {:.12}, {dt:.3} s", terms.sha_predicted))
}

fn rank1() -> Outcome {
    let t = Instant::now();
    let c = Curve::from_coefficients([0, 0, 1, -1, 0]).unwrap();
    let terms = assemble::<f64>(&c, &[RationalPoint::from_ints(0, 0)], None, 1e-14).map_err(|e| e.to_string())?;
    let dt = t.elapsed().as_secs_f64();
    ensure(terms.root_number == -1, "root number")?;
    ensure(close(terms.l_star, 0.305_999_773_834_052, 1e-10), format!("L'(1) {}", terms.l_star))?;
    ensure(close(terms.omega_c_infty, 5.986_917_292_463_92, 1e-10), "omega")?;
    ensure(close(terms.regulator, 0.051_111_408_239_968_84, 1e-10), "height of (0,0)")?;
    ensure((terms.sha_predicted - 1.0).abs() < 1e-4, format!("sha {}", terms.sha_predicted))?;
    ensure(dt < 5.0, format!("took {dt:.3} s"))?;
    Ok(format!("37a1 sha = {:.12}, {dt:.3} s", terms.sha_predicted))
}

fn archimedean_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for e in bundled() {
        let c = e.curve();
        let direct = archimedean_data::<f64>(c.minimal_model()).c_infty;
        let d = (direct - archimedean_factor_from_height(&c)).abs();
        ensure(d < 1e-8, format!("{}: {d:e}", e.label))?;
        worst = worst.max(d);
    }
    Ok(format!("24 curves, max deviation {worst:.2e}"))
}

fn leading_coefficient_dominance() -> Outcome {
    let mut n = 0;
    for e in bundled() {
        let c = e.curve();
        let ext = e.external_l_star.as_deref().map(|s| s.parse::<f64>().unwrap());
        let t = assemble::<f64>(&c, e.generators(), ext, 1e-14).map_err(|err| format!("{}: {err}", e.label))?;
        let inv = curve_invariants(&c, t.analytic_order).map_err(|err| err.to_string())?;
        let ln_l = t.l_star.ln();
        ensure(ln_l <= leading_coeff_bound_rank(&inv).ln(), format!("{} rank bound", e.label))?;
        ensure(ln_l <= leading_coeff_bound_cond(&inv).ln(), format!("{} conductor bound", e.label))?;
        n += 1;
    }
    Ok(format!("{n} curves, zero violations"))
}

fn minkowski() -> Outcome {
    let mut n = 0;
    for e in bundled() {
        let gens = e.generators();
        if gens.is_empty() {
            continue;
        }
        let c = e.curve();
        let pts: Vec<RationalPoint> = gens.iter().map(|p| c.to_minimal_point(p).unwrap()).collect();
        let b = extract_basis(c.minimal_model(), &pts, pts.len()).map_err(|err| err.to_string())?;
        let (lhs, rhs) = b.minkowski_sides();
        ensure(lhs <= rhs * (1.0 + 1e-12), format!("{}: {lhs} > {rhs}", e.label))?;
        if pts.len() == 1 {
            ensure((lhs - rhs).abs() < 1e-10 * rhs, format!("{}: no equality at rank 1", e.label))?;
        }
        n += 1;
    }
    Ok(format!("{n} curves of rank 1-3"))
}

fn torsion() -> Outcome {
    for e in bundled() {
        let c = e.curve();
        let em = c.minimal_model();
        let t = c.torsion();
        let n = t.order() as u64;
        ensure(n <= 12 && t.points.len() as u64 == n, format!("{}: order {n}", e.label))?;
        for p in &t.points {
            ensure(em.contains(p), format!("{}: point off the curve", e.label))?;
            let k = em.order_up_to(p, 12).ok_or(format!("{}: point of infinite order", e.label))?;
            ensure(n.is_multiple_of(k), format!("{}: point order {k}", e.label))?;
        }
        ensure(torsion_order_multiple(em, 100).is_multiple_of(n), format!("{}: injection bound", e.label))?;
        for p in primes_up_to(100) {
            if !c.is_good(p) {
                continue;
            }
            let m = if p == 2 { n >> n.trailing_zeros() } else { n };
            ensure(count_points_naive(em, p).is_multiple_of(m), format!("{}: #E(F_{p})", e.label))?;
        }
    }
    Ok("24 curves, orders verified in the group law".into())
}

fn bound_engine() -> Outcome {
    let b1 = torsion_bound_elliptic(1).map_err(|e| e.to_string())?.ln();
    ensure(close(b1, 19_823.546_687_378_4, 1e-10), format!("ln B(1) = {b1}"))?;
    let cfg = ConstantsConfig::default();
    let v = |f: u64, h: f64, r: u32, eps: f64| validate(VarietyInvariants::new(1, 1, 1, f, h, r, eps)).unwrap();
    let lr = leading_coeff_bound_rank(&v(11, 1.0, 0, 0.5)).ln();
    ensure(close(lr, 1.558_295_147_326_06, 1e-10), format!("rank bound {lr}"))?;
    let lc = leading_coeff_bound_cond(&v(11, 1.0, 0, 0.5)).value();
    ensure(close(lc, 41.885_970_803_396_6, 1e-10), format!("conductor bound {lc}"))?;
    let sr = sha_reg_bound_general(&v(11, 1.0, 0, 0.5), &cfg).unwrap().ln_bound.ln();
    ensure(close(sr, 6.847_022_115_741_73, 1e-10), format!("sha reg {sr}"))?;
    let g = generator_height_bound(&v(37, 1.0, 1, 0.5), &cfg).unwrap().ln_bound.ln();
    ensure(close(g, 10.299_648_715_447_0, 1e-10), format!("generator bound {g}"))?;
    let x = sha_bound_szpiro(&v(1_000_000, 1.0, 0, 0.01), &cfg).unwrap().conductor_exponent.unwrap();
    ensure(close(x, 0.76, 1e-12), format!("Szpiro exponent {x}"))?;
    Ok(format!("ln B(1) = {b1:.10}"))
}

fn analytic_lemma() -> Outcome {
    let t = Instant::now();
    let bad = analytic_lemma_failures(20_000);
    let dt = t.elapsed().as_secs_f64();
    ensure(bad == [1], format!("failures at {bad:?}"))?;
    ensure(dt < 1.0, format!("took {dt:.3} s"))?;
    Ok(format!("holds for 2 <= n <= 20000, fails at n = 1 (ln theta(1) < 0), sieve {dt:.3} s"))
}

fn hasse_fuzz() -> Outcome {
    const N: usize = 20_000;
    let curves: Vec<Curve> = bundled().iter().map(|e| e.curve()).collect();
    let coeffs: Vec<Vec<i64>> = curves.iter().map(|c| coefficients(c, N).a).collect();
    let primes = primes_up_to(N as u64);
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut pick = |n: usize| (rng.next_u64() % n as u64) as usize;
    let mut coprime = 0;
    for _ in 0..10_000 {
        let a = &coeffs[pick(coeffs.len())];
        let p = primes[pick(primes.len())] as i64;
        let ap = a[p as usize];
        ensure(ap * ap <= 4 * p, format!("a_{p} = {ap}"))?;
        let m = 1 + pick(N);
        let n = 1 + pick(N / m);
        if num_integer::gcd(m, n) == 1 {
            coprime += 1;
            ensure(a[m * n] == a[m] * a[n], format!("a_{m}{n}"))?;
        }
    }
    Ok(format!("10000 draws, {coprime} coprime products, zero violations"))
}

fn manin() -> Outcome {
    let t = Instant::now();
    let cfg = ConstantsConfig::default();
    let c = Curve::from_coefficients([0, 0, 1, -1, 0]).unwrap();
    let (b, cert) = manin_procedure(&c, &cfg, &ManinOptions::default()).map_err(|e| e.to_string())?;
    let unit = cert.cutoff_canonical_ln_unit_height.unwrap_or(f64::NAN);
    ensure((unit - 10.3).abs() < 0.01, format!("cutoff {unit}"))?;
    ensure(b.points == [RationalPoint::from_ints(0, 0)], format!("basis {:?}", b.points))?;
    ensure(cert.minkowski_holds(), "Minkowski")?;
    let h = canonical_height_minimal::<f64>(c.minimal_model(), &b.points[0]);
    ensure(close(b.regulator, h, 1e-12), "regulator")?;
    let c = Curve::from_coefficients([0, -1, 1, -10, -20]).unwrap();
    let (b0, cert0) = manin_procedure(&c, &cfg, &ManinOptions::default()).map_err(|e| e.to_string())?;
    ensure(b0.points.is_empty() && cert0.exhaustive, "11a1 basis")?;
    let dt = t.elapsed().as_secs_f64();
    ensure(dt < 30.0, format!("took {dt:.1} s"))?;
    Ok(format!(
        "37a1 cutoff ln {unit:.4} (unit h), basis [(0,0)], {} candidates; 11a1 empty; {dt:.2} s",
        cert.points_scanned
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("BSD identity, rank 0 (11a1)", rank0),
        ("BSD identity, rank 1 (37a1)", rank1),
        ("archimedean factor from period ratio and Faltings height", archimedean_identity),
        ("leading coefficient below both bounds", leading_coefficient_dominance),
        ("successive minima certificate", minkowski),
        ("torsion orders", torsion),
        ("bound engine closed forms", bound_engine),
        ("analytic lemma sweep", analytic_lemma),
        ("Hasse bound and multiplicativity fuzz", hasse_fuzz),
        ("generator search end to end", manin),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
