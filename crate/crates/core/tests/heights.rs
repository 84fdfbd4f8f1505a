//! Canonical heights against a frozen table (tools/gen_height_fixture.py).

use bsdlab_core::elliptic::{canonical_height, Curve, EllipticCurveQ, RationalPoint};
use bsdlab_core::{DoubleDouble, Real};
use num_bigint::BigInt;
use num_rational::BigRational;

fn rows() -> Vec<(Curve, RationalPoint, String)> {
    include_str!("data/heights.txt")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let parts: Vec<&str> = line.split('|').map(str::trim).collect();
            let a: Vec<BigInt> = parts[0].split(',').map(|s| s.parse().unwrap()).collect();
            let e = Curve::new(EllipticCurveQ::new(a.try_into().unwrap()).unwrap());
            let q = |s: &str| s.parse::<BigRational>().unwrap();
            (e, RationalPoint::new(q(parts[1]), q(parts[2])), parts[3].to_string())
        })
        .collect()
}

#[test]
fn double_precision_heights() {
    for (e, p, h) in rows() {
        let want: f64 = h.parse().unwrap();
        let got: f64 = canonical_height(&e, &p).unwrap();
        assert!((got - want).abs() <= 1e-11 * want.max(1.0), "{} {p}: {got} vs {want}", e.input_model());
    }
}

#[test]
fn extended_precision_heights() {
    for (e, p, h) in rows() {
        if h.len() < 30 {
            continue;
        }
        let want = DoubleDouble::parse_decimal(&h).unwrap();
        let got: DoubleDouble = canonical_height(&e, &p).unwrap();
        let err = (got - want).abs().to_f64();
        assert!(err <= 1e-26 * want.to_f64().max(1.0), "{} {p}: err {err:e}", e.input_model());
    }
}
