//! Variety-level invariants `(g, d, D_K, F, h, r, eps)` and the constants
//! that the bound formulas leave unspecified.

use num_bigint::BigUint;
use num_traits::Pow;
use thiserror::Error;

use crate::real::ln_bigint;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarietyInvariants {
    /// Dimension.
    pub g: u32,
    /// Degree `[K:Q]`.
    pub d: u32,
    /// Absolute discriminant of `K`.
    pub disc: u64,
    /// Norm of the conductor.
    pub cond: u64,
    /// Faltings height, natural-log normalisation; may be negative.
    pub faltings: f64,
    pub rank: u32,
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum InvariantsError {
    #[error("invalid invariants: {0}")]
    Invalid(&'static str),
    #[error("F * D_K^(2g) = {norm} does not exceed 10^(g*d) = 10^{exponent}")]
    FontaineViolation { norm: BigUint, exponent: u64 },
    #[error("invalid constants: {0}")]
    InvalidConstants(&'static str),
}

impl VarietyInvariants {
    pub fn new(g: u32, d: u32, disc: u64, cond: u64, faltings: f64, rank: u32, eps: f64) -> Self {
        VarietyInvariants { g, d, disc, cond, faltings, rank, eps }
    }

    /// Elliptic curve over Q: `g = d = D_K = 1`.
    pub fn elliptic_q(cond: u64, faltings: f64, rank: u32) -> Self {
        VarietyInvariants::new(1, 1, 1, cond, faltings, rank, 0.5)
    }

    fn check_type(&self) -> Result<(), InvariantsError> {
        if self.g == 0 {
            return Err(InvariantsError::Invalid("g must be at least 1"));
        }
        if self.d == 0 {
            return Err(InvariantsError::Invalid("d must be at least 1"));
        }
        if self.disc == 0 {
            return Err(InvariantsError::Invalid("D_K must be at least 1"));
        }
        if self.cond == 0 {
            return Err(InvariantsError::Invalid("F must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(InvariantsError::Invalid("eps must be a positive real"));
        }
        if !self.faltings.is_finite() {
            return Err(InvariantsError::Invalid("Faltings height must be finite"));
        }
        if self.d == 1 && self.disc != 1 {
            return Err(InvariantsError::Invalid("D_K must be 1 when d = 1"));
        }
        Ok(())
    }

    /// `F * D_K^(2g)` computed exactly.
    pub fn q_conductor(&self) -> BigUint {
        BigUint::from(self.cond) * BigUint::from(self.disc).pow(2 * self.g)
    }

    /// `max(h, 1)`.
    pub fn h_plus(&self) -> f64 {
        self.faltings.max(1.0)
    }
}

/// Invariants that passed [`validate`]. The bounds module accepts nothing else.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedInvariants {
    inner: VarietyInvariants,
    ln_q_conductor: f64,
}

impl ValidatedInvariants {
    pub fn get(&self) -> &VarietyInvariants {
        &self.inner
    }

    pub fn into_inner(self) -> VarietyInvariants {
        self.inner
    }

    /// `ln(F * D_K^(2g))`, computed from the exact product.
    pub fn ln_q_conductor(&self) -> f64 {
        self.ln_q_conductor
    }

    /// Checks the type invariants only and skips the conductor inequality.
    /// For evaluating formulas at points that no actual variety attains.
    pub fn new_unchecked(inv: VarietyInvariants) -> Result<Self, InvariantsError> {
        inv.check_type()?;
        let ln_q_conductor = ln_bigint(&inv.q_conductor().into());
        Ok(ValidatedInvariants { inner: inv, ln_q_conductor })
    }

    /// Same invariants with a different `h`. Validity does not depend on `h`.
    pub fn with_faltings(&self, h: f64) -> Self {
        let mut v = self.clone();
        v.inner.faltings = h;
        v
    }

    pub fn with_rank(&self, r: u32) -> Self {
        let mut v = self.clone();
        v.inner.rank = r;
        v
    }
}

impl core::ops::Deref for ValidatedInvariants {
    type Target = VarietyInvariants;
    fn deref(&self) -> &VarietyInvariants {
        &self.inner
    }
}

/// Checks the type invariants and the strict inequality `F * D_K^(2g) > 10^(g d)`.
pub fn validate(inv: VarietyInvariants) -> Result<ValidatedInvariants, InvariantsError> {
    inv.check_type()?;
    let norm = inv.q_conductor();
    let exponent = inv.g as u64 * inv.d as u64;
    let ten_pow = BigUint::from(10u32).pow(exponent);
    if norm <= ten_pow {
        return Err(InvariantsError::FontaineViolation { norm, exponent });
    }
    let ln_q_conductor = ln_bigint(&norm.into());
    Ok(ValidatedInvariants { inner: inv, ln_q_conductor })
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QInvariants {
    pub g_prime: u64,
    #[cfg_attr(feature = "serde", serde(with = "biguint_string"))]
    pub n: BigUint,
}

/// Restriction of scalars to Q: `(g d, F D_K^(2g))`.
pub fn to_q_invariants(inv: &ValidatedInvariants) -> QInvariants {
    QInvariants::of(inv.get())
}

impl QInvariants {
    pub fn of(inv: &VarietyInvariants) -> Self {
        QInvariants { g_prime: inv.g as u64 * inv.d as u64, n: inv.q_conductor() }
    }
}

#[cfg(feature = "serde")]
mod biguint_string {
    use alloc::string::{String, ToString};
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `c_{d,g}` of the archimedean lemma.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum MatrixConstant {
    /// `(3 d^2)^(-d)` when `g = 1`, else 1.
    #[default]
    Auto,
    Value(f64),
}

impl MatrixConstant {
    pub fn resolve(self, g: u32, d: u32) -> f64 {
        match self {
            MatrixConstant::Value(c) => c,
            MatrixConstant::Auto if g == 1 => {
                let d = d as f64;
                libm::pow(3.0 * d * d, -d)
            }
            MatrixConstant::Auto => 1.0,
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for MatrixConstant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MatrixConstant::Auto => s.serialize_str("auto"),
            MatrixConstant::Value(c) => s.serialize_f64(*c),
        }
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for MatrixConstant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = MatrixConstant;
            fn expecting(&self, f: &mut core::fmt::Formatter) -> core::fmt::Result {
                f.write_str("a positive number or \"auto\"")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<MatrixConstant, E> {
                if v.eq_ignore_ascii_case("auto") {
                    Ok(MatrixConstant::Auto)
                } else {
                    v.parse().map(MatrixConstant::Value).map_err(E::custom)
                }
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<MatrixConstant, E> {
                Ok(MatrixConstant::Value(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<MatrixConstant, E> {
                Ok(MatrixConstant::Value(v as f64))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<MatrixConstant, E> {
                Ok(MatrixConstant::Value(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

/// Every constant the bound formulas leave unspecified.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ConstantsConfig {
    /// Lang-Masser constant `c_[K:Q]`.
    pub masser_c: f64,
    pub matrix_c: MatrixConstant,
    pub c_tors: f64,
    /// Ooe-Top rank bound coefficients; all zero means not configured.
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Additive constant in the generalised Szpiro inequality.
    pub szpiro_c_eps_d: f64,
    /// Multiplicative constant `c_{d,g}` in front of the Sha/regulator,
    /// generator and naive Sha bounds.
    pub prefactor_c: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig {
            masser_c: 1.0,
            matrix_c: MatrixConstant::Auto,
            c_tors: 1.0,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            szpiro_c_eps_d: 0.0,
            prefactor_c: 1.0,
        }
    }
}

impl ConstantsConfig {
    pub fn validate(&self) -> Result<(), InvariantsError> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !pos(self.masser_c) {
            return Err(InvariantsError::InvalidConstants("masser_c must be positive"));
        }
        if let MatrixConstant::Value(c) = self.matrix_c {
            if !pos(c) {
                return Err(InvariantsError::InvalidConstants("matrix_c must be positive"));
            }
        }
        if !pos(self.c_tors) {
            return Err(InvariantsError::InvalidConstants("c_tors must be positive"));
        }
        if !pos(self.prefactor_c) {
            return Err(InvariantsError::InvalidConstants("prefactor_c must be positive"));
        }
        for g in [self.gamma1, self.gamma2, self.gamma3] {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(InvariantsError::InvalidConstants("gamma_i must be non-negative"));
            }
        }
        if !self.szpiro_c_eps_d.is_finite() {
            return Err(InvariantsError::InvalidConstants("szpiro_c_eps_d must be finite"));
        }
        Ok(())
    }
}
