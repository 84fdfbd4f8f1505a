//! Conductor, Kodaira symbols, Tamagawa numbers and torsion against a frozen
//! table (generated by tools/gen_local_fixture.py).

use bsdlab_core::elliptic::{Curve, EllipticCurveQ, Kodaira};
use num_bigint::{BigInt, BigUint};

fn kodaira_code(k: Kodaira) -> i64 {
    match k {
        Kodaira::I0 => 1,
        Kodaira::II => 2,
        Kodaira::III => 3,
        Kodaira::IV => 4,
        Kodaira::I(n) => 4 + n as i64,
        Kodaira::I0Star => -1,
        Kodaira::IIStar => -2,
        Kodaira::IIIStar => -3,
        Kodaira::IVStar => -4,
        Kodaira::IStar(n) => -4 - n as i64,
    }
}

struct Row {
    a: [BigInt; 5],
    conductor: BigUint,
    local: Vec<(u64, u32, i64, u32)>,
    torsion: (u32, u32),
}

fn rows() -> Vec<Row> {
    include_str!("data/local_data.txt")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let parts: Vec<&str> = line.split('|').map(str::trim).collect();
            let a: Vec<BigInt> = parts[0].split(',').map(|s| s.parse().unwrap()).collect();
            let local = parts[2]
                .split_whitespace()
                .map(|t| {
                    let f: Vec<&str> = t.split(':').collect();
                    (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap())
                })
                .collect();
            let t: Vec<u32> = parts[3].split(',').map(|s| s.parse().unwrap()).collect();
            Row { a: a.try_into().unwrap(), conductor: parts[1].parse().unwrap(), local, torsion: (t[0], t[1]) }
        })
        .collect()
}

#[test]
fn local_data_matches_table() {
    let rows = rows();
    assert_eq!(rows.len(), 400);
    for row in rows {
        let e = Curve::new(EllipticCurveQ::new(row.a.clone()).unwrap());
        let who = format!("{}", e.input_model());
        assert_eq!(e.conductor(), &row.conductor, "conductor of {who}");
        assert_eq!(e.local_data().len(), row.local.len(), "bad primes of {who}");
        for (p, f, kod, c) in &row.local {
            let l = e.local_data_at(*p).unwrap_or_else(|| panic!("{who} missing p={p}"));
            assert_eq!((l.f_p, kodaira_code(l.kodaira), l.c_p), (*f, *kod, *c), "{who} at {p}");
        }
    }
}

#[test]
fn torsion_matches_table() {
    for row in rows() {
        let e = Curve::new(EllipticCurveQ::new(row.a.clone()).unwrap());
        let t = e.torsion();
        assert_eq!(t.structure, row.torsion, "{}", e.input_model());
        for p in &t.points {
            assert!(e.minimal_model().contains(p));
        }
    }
}
