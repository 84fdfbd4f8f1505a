//! The bundled curve list and its line format.
//!
//! ```text
//! label:[a1,a2,a3,a4,a6] | conductor=37 rank=1 torsion=1 tamagawa=1 sha=1 gens=[(0,-1)]
//! ```
//!
//! Everything after `|` is optional `key=value` metadata. Blank lines and
//! lines starting with `#` are ignored. `gens` lists points on the given
//! model, `x` and `y` as integers or fractions `n/d`; `lstar` is the decimal
//! value of `L^(r)(1)/r!`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use thiserror::Error;

use crate::elliptic::{Curve, EllipticCurveQ, RationalPoint};

pub const BUNDLED: &str = include_str!("../data/corpus.txt");

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub label: String,
    pub coefficients: [BigInt; 5],
    pub known_conductor: Option<BigUint>,
    pub known_rank: Option<u32>,
    pub known_torsion: Option<u32>,
    pub known_generators: Option<Vec<RationalPoint>>,
    pub known_sha: Option<u64>,
    pub known_tamagawa: Option<u64>,
    pub external_l_star: Option<String>,
}

impl CorpusEntry {
    pub fn curve(&self) -> Curve {
        // coefficients were checked nonsingular at parse time
        Curve::new(EllipticCurveQ::new(self.coefficients.clone()).unwrap().with_label(self.label.clone()))
    }

    pub fn generators(&self) -> &[RationalPoint] {
        self.known_generators.as_deref().unwrap_or(&[])
    }
}

/// Parses `x` as an integer or `n/d`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Parses `[(x,y);(x,y)]`; commas between points are accepted too.
pub fn parse_points(s: &str) -> Option<Vec<RationalPoint>> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
    let mut out = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        let open = rest.strip_prefix('(')?;
        let close = open.find(')')?;
        let (x, y) = open[..close].split_once(',')?;
        out.push(RationalPoint::new(parse_rational(x)?, parse_rational(y)?));
        rest = open[close + 1..].trim_start_matches([';', ',', ' ']);
    }
    Some(out)
}

/// Parses `[a1,a2,a3,a4,a6]`.
pub fn parse_coefficients(s: &str) -> Option<[BigInt; 5]> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    let v: Vec<BigInt> = inner.split(',').map(|t| t.trim().parse().ok()).collect::<Option<_>>()?;
    v.try_into().ok()
}

/// Parses one non-comment line.
pub fn parse_entry(text: &str, line: usize) -> Result<CorpusEntry, CorpusError> {
    let err = |msg: &str| CorpusError::Parse { line, msg: msg.to_string() };
    let (head, meta) = match text.split_once('|') {
        Some((h, m)) => (h, m),
        None => (text, ""),
    };
    let (label, coeffs) = head.split_once(':').ok_or_else(|| err("expected label:[a1,...,a6]"))?;
    let label = label.trim();
    if label.is_empty() {
        return Err(err("empty label"));
    }
    let coefficients = parse_coefficients(coeffs).ok_or_else(|| err("bad coefficient list"))?;
    if EllipticCurveQ::new(coefficients.clone()).is_err() {
        return Err(err("singular curve"));
    }
    let mut e = CorpusEntry {
        label: label.to_string(),
        coefficients,
        known_conductor: None,
        known_rank: None,
        known_torsion: None,
        known_generators: None,
        known_sha: None,
        known_tamagawa: None,
        external_l_star: None,
    };
    for field in meta.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| err("metadata must be key=value"))?;
        let bad = || err(&alloc::format!("bad value for {k}"));
        match k {
            "conductor" => e.known_conductor = Some(v.parse().map_err(|_| bad())?),
            "rank" => e.known_rank = Some(v.parse().map_err(|_| bad())?),
            "torsion" => e.known_torsion = Some(v.parse().map_err(|_| bad())?),
            "tamagawa" => e.known_tamagawa = Some(v.parse().map_err(|_| bad())?),
            "sha" => e.known_sha = Some(v.parse().map_err(|_| bad())?),
            "gens" => e.known_generators = Some(parse_points(v).ok_or_else(bad)?),
            "lstar" => {
                if crate::dd::DoubleDouble::parse_decimal(v).is_none() {
                    return Err(bad());
                }
                e.external_l_star = Some(v.to_string());
            }
            _ => return Err(err(&alloc::format!("unknown key {k}"))),
        }
    }
    let curve = EllipticCurveQ::new(e.coefficients.clone()).unwrap();
    if e.generators().iter().any(|p| !curve.contains(p)) {
        return Err(err("generator not on the curve"));
    }
    Ok(e)
}

pub fn parse(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| parse_entry(l, i + 1))
        .collect()
}

pub fn bundled() -> Vec<CorpusEntry> {
    parse(BUNDLED).expect("bundled corpus is well formed")
}
