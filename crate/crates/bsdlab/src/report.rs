//! JSON and CSV renderings of the core results.
//!
//! Every float goes out in scientific notation with a fixed number of
//! significant digits, so identical runs give byte-identical output.
//! Quantities computed in the selected precision get its digits; those the
//! core only computes in `f64` (bounds, heights in search, checks) always get
//! [`F64_DIGITS`].

use bsdlab_core::bounds::{Assumption, BoundReport};
use bsdlab_core::bsdcheck::{BsdTerms, BsdWarning, Check, Severity, VerificationReport};
use bsdlab_core::elliptic::{Curve, RationalPoint};
use bsdlab_core::invariants::{ConstantsConfig, VarietyInvariants};
use bsdlab_core::lseries::LeadingCoefficient;
use bsdlab_core::mwsearch::{MWBasis, SearchCertificate};
use bsdlab_core::real::{Precision, Real};
use serde_json::{Map, Number, Value};

pub const F64_DIGITS: usize = 12;

pub const SATURATION_CAVEAT: &str =
    "regulator is that of the subgroup spanned by the generators; an index-k subgroup inflates it by k^2";

#[derive(Clone, Copy, Debug)]
pub struct Renderer {
    pub precision: Precision,
}

fn sci(s: String) -> Value {
    // non-finite values have no JSON number form
    match s.parse::<Number>() {
        Ok(n) => Value::Number(n),
        Err(_) => Value::Null,
    }
}

/// `x` in scientific notation with `F64_DIGITS` significant digits.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    sci(x.to_sci_string(F64_DIGITS))
}

/// `{ln, log10}` of a positive quantity given by its natural log.
pub fn log_pair(ln: f64) -> Value {
    obj([("ln", num(ln)), ("log10", num(ln / std::f64::consts::LN_10))])
}

pub fn obj<const N: usize>(fields: [(&str, Value); N]) -> Value {
    let mut m = Map::new();
    for (k, v) in fields {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

/// Rewrites every non-integer number in `v` to the fixed float format.
fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.as_i64().is_none() && n.as_u64().is_none() => n.as_f64().map_or(Value::Null, num),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

pub fn constants(cfg: &ConstantsConfig) -> Value {
    normalize_floats(serde_json::to_value(cfg).expect("constants serialize"))
}

pub fn inputs(inv: &VarietyInvariants) -> Value {
    normalize_floats(serde_json::to_value(inv).expect("invariants serialize"))
}

pub fn assumptions(tags: &[Assumption]) -> Value {
    Value::Array(tags.iter().map(|a| Value::String(a.tag().to_string())).collect())
}

pub fn point(p: &RationalPoint) -> Value {
    match p {
        RationalPoint::Infinity => Value::String("O".into()),
        RationalPoint::Affine { x, y } => Value::String(format!("({x},{y})")),
    }
}

fn integer(s: String) -> Value {
    Value::Number(s.parse().expect("decimal integer"))
}

pub fn coefficients(c: &bsdlab_core::elliptic::EllipticCurveQ) -> Value {
    Value::Array(c.a_invariants().iter().map(|a| integer(a.to_string())).collect())
}

impl Renderer {
    pub fn new(precision: Precision) -> Self {
        Renderer { precision }
    }

    pub fn digits(&self) -> usize {
        self.precision.digits()
    }

    /// A value computed in the working precision.
    pub fn real<R: Real>(&self, x: R) -> Value {
        if !x.is_finite() {
            return Value::Null;
        }
        sci(x.to_sci_string(R::PRECISION.digits()))
    }

    pub fn precision_field(&self) -> Value {
        let mode = match self.precision {
            Precision::Double => "double",
            Precision::Extended => "extended",
        };
        obj([
            ("mode", Value::String(mode.into())),
            ("significant_digits", Value::from(self.digits())),
            ("f64_digits", Value::from(F64_DIGITS)),
        ])
    }

    /// Adds the shared header fields to a report object.
    pub fn envelope(&self, kind: &str, body: Value, cfg: &ConstantsConfig, tags: &[Assumption]) -> Value {
        let mut m = Map::new();
        m.insert("report".into(), Value::String(kind.into()));
        m.insert("precision".into(), self.precision_field());
        m.insert("constants".into(), constants(cfg));
        m.insert("assumptions".into(), assumptions(tags));
        if let Value::Object(b) = body {
            m.extend(b);
        } else {
            m.insert("result".into(), body);
        }
        Value::Object(m)
    }

    pub fn bound(&self, r: &BoundReport) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(r.name.into()));
        m.insert("ln_bound".into(), num(r.ln_bound.ln()));
        m.insert("log10_bound".into(), num(r.ln_bound.log10()));
        m.insert("inputs".into(), inputs(&r.inputs));
        m.insert("constants".into(), constants(&r.constants));
        m.insert("assumptions".into(), assumptions(&r.assumptions));
        m.insert("h_plus".into(), num(r.h_plus));
        if let Some(e) = r.conductor_exponent {
            m.insert("conductor_exponent".into(), num(e));
        }
        m.insert("clamped".into(), Value::Bool(r.clamped));
        Value::Object(m)
    }

    pub fn bound_error(&self, name: &str, inv: &VarietyInvariants, err: &dyn std::fmt::Display) -> Value {
        obj([("name", Value::String(name.into())), ("inputs", inputs(inv)), ("error", Value::String(err.to_string()))])
    }

    pub fn leading_coefficient<R: Real>(&self, lc: &LeadingCoefficient<R>) -> Value {
        let mut m = Map::new();
        m.insert("order".into(), Value::from(lc.analytic_order));
        m.insert("value".into(), self.real(lc.value));
        if lc.value.to_f64() > 0.0 {
            m.insert("value_log".into(), log_pair(lc.value.to_f64().ln()));
        }
        m.insert("root_number".into(), Value::from(lc.root_number));
        m.insert("n_max".into(), Value::from(lc.n_max));
        m.insert("truncation_error".into(), self.real(lc.truncation_error));
        Value::Object(m)
    }

    pub fn curve(&self, c: &Curve) -> Value {
        let mut m = Map::new();
        if let Some(l) = c.label() {
            m.insert("label".into(), Value::String(l.into()));
        }
        m.insert("coefficients".into(), coefficients(c.input_model()));
        m.insert("minimal_model".into(), coefficients(c.minimal_model()));
        m.insert("conductor".into(), integer(c.conductor().to_string()));
        Value::Object(m)
    }

    pub fn bsd_terms<R: Real>(&self, c: &Curve, t: &BsdTerms<R>) -> Value {
        let mut m = match self.curve(c) {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        m.insert("analytic_order".into(), Value::from(t.analytic_order));
        m.insert("root_number".into(), Value::from(t.root_number));
        m.insert("l_star".into(), self.real(t.l_star));
        m.insert("l_star_source".into(), Value::String(if t.l_star_external { "external" } else { "series" }.into()));
        m.insert("l_star_error".into(), self.real(t.l_star_error));
        m.insert("omega".into(), self.real(t.omega_c_infty));
        m.insert("tamagawa_product".into(), integer(t.tamagawa_product.to_string()));
        m.insert("torsion_order".into(), Value::from(t.torsion_order));
        m.insert("torsion_dual_order".into(), Value::from(t.torsion_dual_order));
        m.insert("generators".into(), Value::Array(t.generators.iter().map(point).collect()));
        m.insert("generator_heights".into(), Value::Array(t.generator_heights.iter().map(|h| self.real(*h)).collect()));
        m.insert("regulator".into(), self.real(t.regulator));
        m.insert("disc_factor".into(), self.real(t.disc_factor));
        m.insert("sha_predicted".into(), self.real(t.sha_predicted));
        m.insert("sha_nearest".into(), Value::from(t.sha_nearest));
        m.insert("sha_distance".into(), self.real(t.sha_distance));
        m.insert("sha_nearest_is_square".into(), Value::Bool(t.sha_nearest_is_square));
        m.insert("warnings".into(), Value::Array(t.warnings.iter().map(warning).collect()));
        m.insert("notes".into(), Value::Array(vec![Value::String(SATURATION_CAVEAT.into())]));
        Value::Object(m)
    }

    pub fn check(&self, c: &Check) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(c.name.into()));
        let sev = match c.severity {
            Severity::Hard => "hard",
            Severity::Soft => "soft",
        };
        m.insert("severity".into(), Value::String(sev.into()));
        m.insert("kind".into(), Value::String(if c.lower_bound { "lower" } else { "upper" }.into()));
        m.insert("actual".into(), log_pair(c.ln_actual));
        m.insert("bound".into(), log_pair(c.ln_bound));
        m.insert("margin_ln".into(), num(c.margin()));
        m.insert("passed".into(), Value::Bool(c.passed));
        m.insert("assumptions".into(), assumptions(check_assumptions(c.name)));
        if let Some((name, v)) = c.implied_constant {
            m.insert("implied_constant".into(), obj([("name", Value::String(name.into())), ("value", num(v))]));
        }
        if let Some(n) = &c.note {
            m.insert("note".into(), Value::String(n.clone()));
        }
        Value::Object(m)
    }

    pub fn verification(&self, r: &VerificationReport) -> Value {
        obj([
            ("passed_hard", Value::Bool(r.passed_hard())),
            ("hard_failures", Value::from(r.hard_failures().count())),
            ("checks", Value::Array(r.checks.iter().map(|c| self.check(c)).collect())),
        ])
    }

    pub fn search(&self, b: &MWBasis, cert: &SearchCertificate) -> Value {
        let mut c = Map::new();
        c.insert("rank".into(), Value::from(cert.rank));
        let opt = |x: Option<f64>| x.map_or(Value::Null, log_pair);
        c.insert("cutoff_canonical".into(), opt(cert.cutoff_canonical_ln));
        c.insert("cutoff_canonical_unit_height".into(), opt(cert.cutoff_canonical_ln_unit_height));
        c.insert(
            "height_difference".into(),
            obj([("lower", num(cert.height_difference.0)), ("upper", num(cert.height_difference.1))]),
        );
        c.insert("cutoff_naive_ln".into(), num(cert.cutoff_naive));
        c.insert("naive_height_reached_ln".into(), num(cert.naive_height_reached));
        c.insert("points_scanned".into(), Value::from(cert.points_scanned));
        c.insert("points_found".into(), Value::from(cert.points_found));
        c.insert("exhaustive".into(), Value::Bool(cert.exhaustive));
        c.insert(
            "minkowski".into(),
            obj([
                ("height_product", num(cert.minkowski_lhs)),
                ("factorial_regulator", num(cert.minkowski_rhs)),
                ("holds", Value::Bool(cert.minkowski_holds())),
            ]),
        );
        c.insert("bound".into(), cert.bound.as_ref().map_or(Value::Null, |r| self.bound(r)));
        obj([
            ("basis", Value::Array(b.points.iter().map(point).collect())),
            ("heights", Value::Array(b.heights_sorted.iter().map(|h| num(*h)).collect())),
            ("regulator", num(b.regulator)),
            ("certificate", Value::Object(c)),
        ])
    }
}

pub fn warning(w: &BsdWarning) -> Value {
    let s = match w {
        BsdWarning::RankMismatch { analytic_order, generators } => {
            format!("analytic order {analytic_order} but {generators} generators given")
        }
        BsdWarning::ExternalLeadingCoefficient => "leading coefficient supplied externally".to_string(),
        BsdWarning::AssumedAnalyticOrder(r) => {
            format!("analytic order taken as {r} from the generators; the series only shows it is at least 2")
        }
    };
    Value::String(s)
}

/// Hypotheses behind each named check.
pub fn check_assumptions(name: &str) -> &'static [Assumption] {
    match name {
        "sha_reg" => &[Assumption::FE, Assumption::BSD],
        "leading_coeff_rank" | "leading_coeff_cond" => &[Assumption::FE],
        "masser_floor" => &[Assumption::MASSER],
        _ => &[],
    }
}

/// Human-readable table of one curve's checks.
pub fn check_table(label: &str, r: &VerificationReport) -> String {
    let mut s = String::new();
    for c in &r.checks {
        let status = match (c.passed, c.severity) {
            (true, _) => "pass",
            (false, Severity::Hard) => "FAIL",
            (false, Severity::Soft) => "soft-fail",
        };
        let rel = if c.lower_bound { ">=" } else { "<=" };
        s.push_str(&format!(
            "{label:<8} {:<20} {status:<9} ln {:>14.6e} {rel} {:>14.6e}",
            c.name, c.ln_actual, c.ln_bound
        ));
        if let Some((n, v)) = c.implied_constant {
            s.push_str(&format!("  ({n} = {v:.6})"));
        }
        s.push('\n');
    }
    s
}

/// Pretty JSON with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialize");
    s.push('\n');
    s
}
