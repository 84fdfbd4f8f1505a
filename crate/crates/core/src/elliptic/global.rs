//! A curve together with its minimal model and local data.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use super::curve::{minimal_model_with_isomorphism, CurveError, EllipticCurveQ, Isomorphism};
use super::point::RationalPoint;
use super::reduction::ap_good;
use super::tate::{tate_local_data, LocalData, Reduction};
use super::torsion::{torsion_subgroup, TorsionGroup};
use crate::primes::factor;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("p = {0} divides the conductor")]
    BadReduction(u64),
    #[error("point is not on the curve")]
    NonRationalPoint,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Immutable after construction; local data is computed eagerly.
#[derive(Clone, Debug)]
pub struct Curve {
    input: EllipticCurveQ,
    minimal: EllipticCurveQ,
    to_minimal: Isomorphism,
    local: Vec<LocalData>,
    conductor: BigUint,
}

impl Curve {
    pub fn new(input: EllipticCurveQ) -> Self {
        let (minimal, to_minimal) = minimal_model_with_isomorphism(&input);
        let local: Vec<LocalData> =
            factor(minimal.discriminant()).into_iter().map(|(p, _)| tate_local_data(&minimal, &p)).collect();
        let mut conductor = BigUint::one();
        for l in &local {
            conductor *= l.p.pow(l.f_p);
        }
        Curve { input, minimal, to_minimal, local, conductor }
    }

    pub fn from_coefficients(a: [i64; 5]) -> Result<Self, CurveError> {
        Ok(Curve::new(EllipticCurveQ::from_i64(a)?))
    }

    pub fn input_model(&self) -> &EllipticCurveQ {
        &self.input
    }

    pub fn minimal_model(&self) -> &EllipticCurveQ {
        &self.minimal
    }

    pub fn label(&self) -> Option<&str> {
        self.input.label()
    }

    pub fn conductor(&self) -> &BigUint {
        &self.conductor
    }

    pub fn conductor_u64(&self) -> Option<u64> {
        self.conductor.to_u64()
    }

    /// Local data at the primes dividing the minimal discriminant.
    pub fn local_data(&self) -> &[LocalData] {
        &self.local
    }

    pub fn local_data_at(&self, p: u64) -> Option<&LocalData> {
        self.local.iter().find(|l| l.p == BigUint::from(p))
    }

    pub fn tamagawa_product(&self) -> BigUint {
        self.local.iter().map(|l| BigUint::from(l.c_p)).product()
    }

    pub fn is_good(&self, p: u64) -> bool {
        self.local_data_at(p).is_none_or(|l| l.reduction == Reduction::Good)
    }

    /// Trace of Frobenius at a good prime.
    pub fn ap(&self, p: u64) -> Result<i64, ArithmeticError> {
        if !self.is_good(p) {
            return Err(ArithmeticError::BadReduction(p));
        }
        Ok(ap_good(&self.minimal, p))
    }

    /// `a_p` at any prime, with the bad-prime rule, and whether `p` is bad.
    pub fn ap_any(&self, p: u64) -> (i64, bool) {
        match self.local_data_at(p) {
            Some(l) if l.reduction != Reduction::Good => (l.reduction.bad_ap(), true),
            _ => (ap_good(&self.minimal, p), false),
        }
    }

    pub fn torsion(&self) -> TorsionGroup {
        torsion_subgroup(&self.minimal)
    }

    /// A point on the input model, moved to the minimal model.
    pub fn to_minimal_point(&self, p: &RationalPoint) -> Result<RationalPoint, ArithmeticError> {
        if !self.input.contains(p) {
            return Err(ArithmeticError::NonRationalPoint);
        }
        Ok(self.to_minimal.map_point(p))
    }

    pub fn from_minimal_point(&self, p: &RationalPoint) -> RationalPoint {
        self.to_minimal.unmap_point(p)
    }

    pub fn minimal_discriminant(&self) -> &BigInt {
        self.minimal.discriminant()
    }
}
