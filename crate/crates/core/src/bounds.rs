//! Explicit conditional bounds, evaluated in the log domain.
//!
//! `B(1)` alone is about `10^8609`, so every bound is a [`LogMagnitude`].
//! Inside polynomial factors the Faltings height is clamped to
//! `h_plus = max(h, 1)`; exponential factors `e^{-d h}` use the raw `h`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{LN_2, PI};
use core::fmt;
use core::ops::{Div, Mul};

use thiserror::Error;

use crate::invariants::{ConstantsConfig, ValidatedInvariants, VarietyInvariants};
use crate::primes::first_primes;

/// A positive quantity stored as its natural logarithm. Always finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMagnitude(f64);

impl LogMagnitude {
    pub const ONE: LogMagnitude = LogMagnitude(0.0);

    pub fn from_ln(ln_value: f64) -> Option<Self> {
        ln_value.is_finite().then_some(LogMagnitude(ln_value))
    }

    pub fn from_value(x: f64) -> Option<Self> {
        (x > 0.0).then(|| Self::from_ln(libm::log(x))).flatten()
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log10(self) -> f64 {
        self.0 / core::f64::consts::LN_10
    }

    /// The underlying quantity; `inf` once it leaves the `f64` range.
    pub fn value(self) -> f64 {
        libm::exp(self.0)
    }

    pub fn pow(self, k: f64) -> Self {
        LogMagnitude(self.0 * k)
    }
}

impl Eq for LogMagnitude {}

impl PartialOrd for LogMagnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogMagnitude {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

// products of magnitudes are sums of logs
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for LogMagnitude {
    type Output = LogMagnitude;
    fn mul(self, rhs: Self) -> Self {
        LogMagnitude(self.0 + rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for LogMagnitude {
    type Output = LogMagnitude;
    fn div(self, rhs: Self) -> Self {
        LogMagnitude(self.0 - rhs.0)
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

/// Conjectures a bound depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assumption {
    /// Functional equation of the L-series.
    FE,
    BSD,
    SZPIRO,
    /// Lang's lower bound for heights of non-torsion points.
    MASSER,
    #[allow(non_camel_case_types)]
    OOE_TOP,
}

impl Assumption {
    pub fn tag(self) -> &'static str {
        match self {
            Assumption::FE => "FE",
            Assumption::BSD => "BSD",
            Assumption::SZPIRO => "SZPIRO",
            Assumption::MASSER => "MASSER",
            Assumption::OOE_TOP => "OOE_TOP",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub ln_bound: LogMagnitude,
    pub inputs: VarietyInvariants,
    pub constants: ConstantsConfig,
    pub assumptions: Vec<Assumption>,
    /// `max(h, 1)` as used by the polynomial factors.
    pub h_plus: f64,
    /// Exponent of `F` in the Szpiro-substituted bound.
    pub conductor_exponent: Option<f64>,
    /// Set when the bound was clamped to a trivial value.
    pub clamped: bool,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum BoundsError {
    #[error("formula requires g = 1, got g = {0}")]
    WrongDimension(u32),
    #[error("rank 0: no free part, generator bound undefined")]
    RankZero,
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("gamma1 = gamma2 = gamma3 = 0: rank bound not configured")]
    NotConfigured,
    #[error("bound overflows the log domain")]
    Overflow,
}

fn lm(x: f64) -> Result<LogMagnitude, BoundsError> {
    LogMagnitude::from_ln(x).ok_or(BoundsError::Overflow)
}

/// `ln(r!)`: exact sum for small `r`, `ln Gamma(r+1)` beyond 20.
pub fn ln_factorial(r: u32) -> f64 {
    if r <= 20 {
        (2..=r).map(|k| libm::log(k as f64)).sum()
    } else {
        libm::lgamma(r as f64 + 1.0)
    }
}

struct Logs {
    g: f64,
    d: f64,
    r: f64,
    h: f64,
    ln_hp: f64,
    ln_d: f64,
    ln_f: f64,
    lnln_f: f64,
    lnln_n: f64,
}

fn logs(inv: &ValidatedInvariants) -> Result<Logs, BoundsError> {
    if inv.cond < 2 {
        return Err(BoundsError::DegenerateInput("ln ln F needs F >= 2"));
    }
    let ln_f = libm::log(inv.cond as f64);
    Ok(Logs {
        g: inv.g as f64,
        d: inv.d as f64,
        r: inv.rank as f64,
        h: inv.faltings,
        ln_hp: libm::log(inv.h_plus()),
        ln_d: libm::log(inv.disc as f64),
        ln_f,
        lnln_f: libm::log(ln_f),
        lnln_n: libm::log(inv.ln_q_conductor()),
    })
}

fn report(
    name: &'static str,
    ln: f64,
    inv: &ValidatedInvariants,
    cfg: &ConstantsConfig,
    assumptions: &[Assumption],
) -> Result<BoundReport, BoundsError> {
    Ok(BoundReport {
        name,
        ln_bound: lm(ln)?,
        inputs: inv.get().clone(),
        constants: cfg.clone(),
        assumptions: assumptions.to_vec(),
        h_plus: inv.h_plus(),
        conductor_exponent: None,
        clamped: false,
    })
}

/// `ln[(9/2pi)^{gd} sqrt(F) D_K^g]`.
pub fn leading_coeff_bound_rank(inv: &ValidatedInvariants) -> LogMagnitude {
    let (g, d) = (inv.g as f64, inv.d as f64);
    LogMagnitude(
        g * d * libm::log(9.0 / (2.0 * PI)) + 0.5 * libm::log(inv.cond as f64) + g * libm::log(inv.disc as f64),
    )
}

/// `ln[2^r 4^{gd} F^{1/4} D_K^{g/2} (ln(F D_K^{2g}))^{2gd}]`.
pub fn leading_coeff_bound_cond(inv: &ValidatedInvariants) -> LogMagnitude {
    let (g, d, r) = (inv.g as f64, inv.d as f64, inv.rank as f64);
    LogMagnitude(
        r * LN_2
            + g * d * libm::log(4.0)
            + 0.25 * libm::log(inv.cond as f64)
            + 0.5 * g * libm::log(inv.disc as f64)
            + 2.0 * g * d * libm::log(inv.ln_q_conductor()),
    )
}

/// `ln B(d)` for the uniform torsion bound over fields of degree `d`.
pub fn torsion_bound_elliptic(d: u32) -> Result<LogMagnitude, BoundsError> {
    if d == 0 {
        return Err(BoundsError::DegenerateInput("d must be at least 1"));
    }
    let df = d as f64;
    let s = libm::pow(3.0, df / 2.0);
    let exponent = libm::pow(1.0 + s, 8.0) / (2.0 * libm::log(1.0 + s));
    let ln_base = libm::log(129.0) + libm::log(libm::pow(5.0, df) - 1.0) + 6.0 * libm::log(3.0 * df);
    lm(exponent * ln_base)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionBound {
    pub ln_bound: LogMagnitude,
    /// `c_tors ln F <= 1`: the bound says nothing and was clamped to 1.
    pub vacuous: bool,
}

/// `4gd ln(c_tors ln F)`, bounding `|A(K)_tors| |A^(K)_tors|`.
pub fn torsion_bound_general(inv: &ValidatedInvariants, cfg: &ConstantsConfig) -> Result<TorsionBound, BoundsError> {
    let x = cfg.c_tors * libm::log(inv.cond as f64);
    if x <= 0.0 {
        return Err(BoundsError::DegenerateInput("c_tors * ln F must be positive"));
    }
    if x <= 1.0 {
        return Ok(TorsionBound { ln_bound: LogMagnitude::ONE, vacuous: true });
    }
    let gd = inv.g as f64 * inv.d as f64;
    Ok(TorsionBound { ln_bound: lm(4.0 * gd * libm::log(x))?, vacuous: false })
}

/// `(lower, upper)` for the archimedean factor `prod c_v`.
pub fn archimedean_factor_bounds(inv: &ValidatedInvariants, cfg: &ConstantsConfig) -> (LogMagnitude, LogMagnitude) {
    let (g, d) = (inv.g as f64, inv.d as f64);
    let c = cfg.matrix_c.resolve(inv.g, inv.d);
    let ln_hp = libm::log(inv.h_plus());
    let lower = libm::log(c) - g * d * ln_hp - d * inv.faltings;
    let upper = d * LN_2 - d * inv.faltings;
    assert!(lower <= upper, "archimedean sandwich inverted: {lower} > {upper}");
    (LogMagnitude(lower), LogMagnitude(upper))
}

// Shared tail of the Sha/regulator-type bounds, without the h-power.
fn sha_core(l: &Logs, cfg: &ConstantsConfig) -> f64 {
    let gd = l.g * l.d;
    libm::log(cfg.prefactor_c)
        + l.r * LN_2
        + l.g * l.ln_d
        + 0.25 * l.ln_f
        + 4.0 * gd * l.lnln_f
        + 2.0 * gd * l.lnln_n
        + l.d * l.h
}

/// Bound on `|Sha| Reg` for any `g`.
pub fn sha_reg_bound_general(inv: &ValidatedInvariants, cfg: &ConstantsConfig) -> Result<BoundReport, BoundsError> {
    let l = logs(inv)?;
    let ln = sha_core(&l, cfg) + l.g * l.d * l.ln_hp;
    report("sha_reg_bound_general", ln, inv, cfg, &[Assumption::FE, Assumption::BSD])
}

/// Rank-independent bound on `|Sha| Reg` for elliptic curves.
pub fn sha_reg_bound_elliptic(inv: &ValidatedInvariants) -> Result<BoundReport, BoundsError> {
    if inv.g != 1 {
        return Err(BoundsError::WrongDimension(inv.g));
    }
    let l = logs(inv)?;
    let ln_cd = l.d * libm::log(9.0 / (2.0 * PI))
        + l.d * libm::log(3.0 * l.d * l.d)
        + 2.0 * torsion_bound_elliptic(inv.d)?.ln();
    let ln = ln_cd + 1.5 * l.ln_d + 0.5 * l.ln_f + l.d * (l.h + l.ln_hp);
    report("sha_reg_bound_elliptic", ln, inv, &ConstantsConfig::default(), &[Assumption::FE, Assumption::BSD])
}

/// `ln[masser_c h_plus^{-(2g+1)}]`: conditional floor for `h^(P)`, P non-torsion.
pub fn masser_height_floor(inv: &ValidatedInvariants, cfg: &ConstantsConfig) -> LogMagnitude {
    let g = inv.g as f64;
    LogMagnitude(libm::log(cfg.masser_c) - (2.0 * g + 1.0) * libm::log(inv.h_plus()))
}

/// Bound on the height of the largest element of a reduced basis of the free part.
pub fn generator_height_bound(inv: &ValidatedInvariants, cfg: &ConstantsConfig) -> Result<BoundReport, BoundsError> {
    if inv.rank == 0 {
        return Err(BoundsError::RankZero);
    }
    let l = logs(inv)?;
    let ln = sha_core(&l, cfg)
        + 4.0 * ln_factorial(inv.rank)
        + (1.0 - l.r) * libm::log(cfg.masser_c)
        + ((2.0 * l.g + 1.0) * (l.r - 1.0) + l.g * l.d) * l.ln_hp;
    report("generator_height_bound", ln, inv, cfg, &[Assumption::FE, Assumption::BSD, Assumption::MASSER])
}

/// Bound on `|Sha|` obtained by dividing out the regulator via Minkowski.
pub fn sha_bound_naive(inv: &ValidatedInvariants, cfg: &ConstantsConfig) -> Result<BoundReport, BoundsError> {
    let l = logs(inv)?;
    let ln = sha_core(&l, cfg) + 4.0 * ln_factorial(inv.rank) - l.r * libm::log(cfg.masser_c)
        + (l.g * l.d + l.r * (2.0 * l.g + 1.0)) * l.ln_hp;
    report("sha_bound_naive", ln, inv, cfg, &[Assumption::FE, Assumption::BSD, Assumption::MASSER])
}

/// The Szpiro-type substitute `(g/2 + eps) ln F + (g^2 + eps) ln D_K + c`.
pub fn szpiro_height(inv: &VarietyInvariants, cfg: &ConstantsConfig) -> f64 {
    let g = inv.g as f64;
    (g / 2.0 + inv.eps) * libm::log(inv.cond as f64)
        + (g * g + inv.eps) * libm::log(inv.disc as f64)
        + cfg.szpiro_c_eps_d
}

/// [`sha_bound_naive`] with `h` replaced by [`szpiro_height`].
pub fn sha_bound_szpiro(inv: &ValidatedInvariants, cfg: &ConstantsConfig) -> Result<BoundReport, BoundsError> {
    let h_sub = szpiro_height(inv, cfg);
    if h_sub <= 0.0 {
        return Err(BoundsError::DegenerateInput("Szpiro substitute for h is not positive"));
    }
    let mut rep = sha_bound_naive(&inv.with_faltings(h_sub), cfg)?;
    rep.name = "sha_bound_szpiro";
    rep.inputs = inv.get().clone();
    rep.assumptions = vec![Assumption::FE, Assumption::BSD, Assumption::SZPIRO, Assumption::MASSER];
    rep.conductor_exponent = Some(0.25 + (inv.g as f64 / 2.0 + inv.eps) * inv.d as f64);
    Ok(rep)
}

/// `gamma1 ln F + gamma2 ln D_K + gamma3`, a bound on the rank itself.
pub fn rank_bound_ooe_top(inv: &ValidatedInvariants, cfg: &ConstantsConfig) -> Result<f64, BoundsError> {
    if cfg.gamma1 == 0.0 && cfg.gamma2 == 0.0 && cfg.gamma3 == 0.0 {
        return Err(BoundsError::NotConfigured);
    }
    Ok(cfg.gamma1 * libm::log(inv.cond as f64) + cfg.gamma2 * libm::log(inv.disc as f64) + cfg.gamma3)
}

/// `theta(n) = sum of ln p over the first n primes`.
pub fn theta(n: usize) -> f64 {
    first_primes(n).iter().map(|&p| libm::log(p as f64)).sum()
}

/// `n <= 4 theta(n) / ln theta(n)`, evaluated literally.
pub fn analytic_lemma_check(n: usize) -> bool {
    analytic_lemma_holds(n, theta(n))
}

fn analytic_lemma_holds(n: usize, theta_n: f64) -> bool {
    n as f64 <= 4.0 * theta_n / libm::log(theta_n)
}

/// Every `n` in `1..=n_max` where the inequality fails. One sieve for the whole range.
pub fn analytic_lemma_failures(n_max: usize) -> Vec<usize> {
    let mut t = 0.0;
    let mut bad = Vec::new();
    for (i, p) in first_primes(n_max).into_iter().enumerate() {
        t += libm::log(p as f64);
        let n = i + 1;
        if !analytic_lemma_holds(n, t) {
            bad.push(n);
        }
    }
    bad
}

/// Names accepted by [`evaluate`], in report order.
pub const BOUND_NAMES: [&str; 13] = [
    "leading_coeff_bound_rank",
    "leading_coeff_bound_cond",
    "torsion_bound_elliptic",
    "torsion_bound_general",
    "archimedean_factor_lower",
    "archimedean_factor_upper",
    "sha_reg_bound_general",
    "sha_reg_bound_elliptic",
    "masser_height_floor",
    "generator_height_bound",
    "sha_bound_naive",
    "sha_bound_szpiro",
    "rank_bound_ooe_top",
];

/// Evaluates one named bound as a report. Bare log-magnitudes get the
/// assumptions of the statement they come from.
pub fn evaluate(
    name: &str,
    inv: &ValidatedInvariants,
    cfg: &ConstantsConfig,
) -> Option<Result<BoundReport, BoundsError>> {
    use Assumption::*;
    let plain = |n: &'static str, v: LogMagnitude, a: &[Assumption]| report(n, v.ln(), inv, cfg, a);
    let r = match name {
        "leading_coeff_bound_rank" => plain(BOUND_NAMES[0], leading_coeff_bound_rank(inv), &[FE]),
        "leading_coeff_bound_cond" => plain(BOUND_NAMES[1], leading_coeff_bound_cond(inv), &[FE]),
        "torsion_bound_elliptic" => torsion_bound_elliptic(inv.d).and_then(|v| plain(BOUND_NAMES[2], v, &[])),
        "torsion_bound_general" => torsion_bound_general(inv, cfg).and_then(|t| {
            let mut rep = plain(BOUND_NAMES[3], t.ln_bound, &[])?;
            rep.clamped = t.vacuous;
            Ok(rep)
        }),
        "archimedean_factor_lower" => plain(BOUND_NAMES[4], archimedean_factor_bounds(inv, cfg).0, &[]),
        "archimedean_factor_upper" => plain(BOUND_NAMES[5], archimedean_factor_bounds(inv, cfg).1, &[]),
        "sha_reg_bound_general" => sha_reg_bound_general(inv, cfg),
        "sha_reg_bound_elliptic" => sha_reg_bound_elliptic(inv),
        "masser_height_floor" => plain(BOUND_NAMES[8], masser_height_floor(inv, cfg), &[MASSER]),
        "generator_height_bound" => generator_height_bound(inv, cfg),
        "sha_bound_naive" => sha_bound_naive(inv, cfg),
        "sha_bound_szpiro" => sha_bound_szpiro(inv, cfg),
        "rank_bound_ooe_top" => rank_bound_ooe_top(inv, cfg).and_then(|x| {
            let v = LogMagnitude::from_value(x).ok_or(BoundsError::DegenerateInput("rank bound is not positive"))?;
            plain(BOUND_NAMES[12], v, &[OOE_TOP])
        }),
        _ => return None,
    };
    Some(r)
}
