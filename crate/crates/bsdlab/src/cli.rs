//! Argument parsing and the six commands.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use bsdlab_core::bounds::{evaluate, Assumption, BOUND_NAMES};
use bsdlab_core::bsdcheck::{assemble, curve_invariants, verify_against_bounds, BsdError};
use bsdlab_core::corpus::{self, CorpusEntry};
use bsdlab_core::elliptic::{Curve, EllipticCurveQ, RationalPoint};
use bsdlab_core::invariants::{validate, ConstantsConfig, MatrixConstant, VarietyInvariants};
use bsdlab_core::lseries::leading_coefficient;
use bsdlab_core::mwsearch::{manin_procedure, ManinOptions, DEFAULT_BUDGET};
use bsdlab_core::real::{Precision, Real};
use bsdlab_core::DoubleDouble;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::report::{self, obj, Renderer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const PRECISION_VAR: &str = "BSDLAB_PRECISION";

#[derive(Parser, Debug)]
#[command(name = "bsdlab", version, about = "Conditional BSD bounds and desk-scale BSD checks")]
pub struct Cli {
    /// Corpus file used to resolve curve labels (default: the bundled corpus).
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate bound formulas for given invariants.
    Bounds(BoundsArgs),
    /// Assemble the BSD quotient for one curve.
    Bsd(BsdArgs),
    /// Leading coefficient of L(E, s) at s = 1.
    Lvalue(LvalueArgs),
    /// Search for a Mordell-Weil basis up to the conditional height cutoff.
    Search(SearchArgs),
    /// Check every corpus curve against the bounds.
    Verify(VerifyArgs),
    /// Parse the corpus and recompute its metadata.
    Corpus,
}

#[derive(Args, Debug, Clone, Default)]
struct ConstantsArgs {
    /// JSON object with any ConstantsConfig fields; flags override it.
    #[arg(long)]
    constants: Option<PathBuf>,
    #[arg(long)]
    masser_c: Option<f64>,
    /// A positive number or "auto".
    #[arg(long)]
    matrix_c: Option<String>,
    #[arg(long)]
    c_tors: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    gamma3: Option<f64>,
    #[arg(long)]
    szpiro_c: Option<f64>,
    #[arg(long)]
    prefactor_c: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    d: u32,
    /// Conductor norm; repeat for a grid.
    #[arg(long, required = true)]
    cond: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    disc: u64,
    /// Faltings height; repeat for a grid.
    #[arg(long, required = true, allow_negative_numbers = true)]
    faltings: Vec<f64>,
    /// Rank; repeat for a grid.
    #[arg(long, default_value = "0")]
    rank: Vec<u32>,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Bound names to evaluate (default: all).
    names: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    constants: ConstantsArgs,
}

#[derive(Args, Debug)]
struct BsdArgs {
    /// Corpus label or `[a1,a2,a3,a4,a6]`.
    curve: String,
    /// Generators on the given model, `[(x,y);(x,y)]`; corpus curves default to the listed ones.
    #[arg(long)]
    gens: Option<String>,
    /// External leading coefficient `L^(r)(1)/r!` for analytic order >= 2.
    #[arg(long)]
    lstar: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct LvalueArgs {
    curve: String,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    curve: String,
    /// Canonical-height cutoff replacing the conditional bound.
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Rank to search for; required when the analytic order is at least 2.
    #[arg(long)]
    rank: Option<u32>,
    #[command(flatten)]
    constants: ConstantsArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    constants: ConstantsArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    /// A computation failed; the JSON goes to stdout.
    Failure(Value),
}

type CliResult = Result<i32, CliError>;

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Entry point shared by `main` and the tests. `precision` is the raw value
/// of `BSDLAB_PRECISION`, if set.
pub fn run<I, T>(args: I, precision: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let precision = match precision {
        None => Precision::Double,
        Some(s) => match Precision::parse(s) {
            Some(p) => p,
            None => {
                let _ = writeln!(err, "error: {PRECISION_VAR} must be `double` or `extended`, got `{s}`");
                return EXIT_USAGE;
            }
        },
    };
    let r = Renderer::new(precision);
    match dispatch(&cli, r, out) {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Failure(v)) => {
            if let Some(m) = v.get("error").and_then(Value::as_str) {
                let _ = writeln!(err, "error: {m}");
            }
            let _ = out.write_all(report::to_string(&v).as_bytes());
            EXIT_FAILURE
        }
    }
}

fn dispatch(cli: &Cli, r: Renderer, out: &mut dyn Write) -> CliResult {
    let entries = || load_corpus(cli.corpus.as_ref());
    match &cli.command {
        Command::Bounds(a) => bounds(a, r, out),
        Command::Bsd(a) => match r.precision {
            Precision::Double => bsd::<f64>(a, &entries()?, r, out),
            Precision::Extended => bsd::<DoubleDouble>(a, &entries()?, r, out),
        },
        Command::Lvalue(a) => match r.precision {
            Precision::Double => lvalue::<f64>(a, &entries()?, r, out),
            Precision::Extended => lvalue::<DoubleDouble>(a, &entries()?, r, out),
        },
        Command::Search(a) => search(a, &entries()?, r, out),
        Command::Verify(a) => match r.precision {
            Precision::Double => verify::<f64>(a, &entries()?, r, out),
            Precision::Extended => verify::<DoubleDouble>(a, &entries()?, r, out),
        },
        Command::Corpus => corpus_cmd(cli.corpus.as_ref(), r, out),
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    out.write_all(report::to_string(v).as_bytes()).map_err(|e| usage(format!("cannot write output: {e}")))
}

fn load_corpus(path: Option<&PathBuf>) -> Result<Vec<CorpusEntry>, CliError> {
    match path {
        None => Ok(corpus::bundled()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            corpus::parse(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

fn constants(a: &ConstantsArgs) -> Result<ConstantsConfig, CliError> {
    let mut cfg = match &a.constants {
        None => ConstantsConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
    };
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut cfg.masser_c, a.masser_c);
    set(&mut cfg.c_tors, a.c_tors);
    set(&mut cfg.gamma1, a.gamma1);
    set(&mut cfg.gamma2, a.gamma2);
    set(&mut cfg.gamma3, a.gamma3);
    set(&mut cfg.szpiro_c_eps_d, a.szpiro_c);
    set(&mut cfg.prefactor_c, a.prefactor_c);
    if let Some(m) = &a.matrix_c {
        cfg.matrix_c = if m.eq_ignore_ascii_case("auto") {
            MatrixConstant::Auto
        } else {
            MatrixConstant::Value(m.parse().map_err(|_| usage(format!("--matrix-c: `{m}` is not a number")))?)
        };
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

struct Target {
    curve: Curve,
    generators: Vec<RationalPoint>,
    l_star: Option<String>,
}

fn resolve(arg: &str, entries: &[CorpusEntry]) -> Result<Target, CliError> {
    if arg.trim_start().starts_with('[') {
        let a = corpus::parse_coefficients(arg).ok_or_else(|| usage(format!("bad coefficient list `{arg}`")))?;
        let e = EllipticCurveQ::new(a).map_err(|e| usage(format!("{arg}: {e}")))?;
        return Ok(Target { curve: Curve::new(e), generators: Vec::new(), l_star: None });
    }
    let entry =
        entries.iter().find(|e| e.label == arg).ok_or_else(|| usage(format!("unknown curve label `{arg}`")))?;
    Ok(Target { curve: entry.curve(), generators: entry.generators().to_vec(), l_star: entry.external_l_star.clone() })
}

trait ParseReal: Real {
    fn parse_real(s: &str) -> Option<Self>;
    fn default_tol() -> f64;
}

impl ParseReal for f64 {
    fn parse_real(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn default_tol() -> f64 {
        1e-14
    }
}

impl ParseReal for DoubleDouble {
    fn parse_real(s: &str) -> Option<Self> {
        DoubleDouble::parse_decimal(s)
    }
    fn default_tol() -> f64 {
        1e-30
    }
}

fn failure(
    r: Renderer,
    kind: &str,
    curve: Option<&Curve>,
    msg: impl std::fmt::Display,
    cfg: &ConstantsConfig,
) -> CliError {
    let mut body = Map::new();
    if let Some(c) = curve {
        if let Value::Object(m) = r.curve(c) {
            body.extend(m);
        }
    }
    body.insert("error".into(), Value::String(msg.to_string()));
    CliError::Failure(r.envelope(kind, Value::Object(body), cfg, &[]))
}

fn bounds(a: &BoundsArgs, r: Renderer, out: &mut dyn Write) -> CliResult {
    let cfg = constants(&a.constants)?;
    let names: Vec<&str> = if a.names.is_empty() {
        BOUND_NAMES.to_vec()
    } else {
        for n in &a.names {
            if !BOUND_NAMES.contains(&n.as_str()) {
                return Err(usage(format!("unknown bound `{n}`; known: {}", BOUND_NAMES.join(", "))));
            }
        }
        a.names.iter().map(String::as_str).collect()
    };
    let mut grid = Vec::new();
    for &cond in &a.cond {
        for &h in &a.faltings {
            for &rank in &a.rank {
                let inv = VarietyInvariants::new(a.g, a.d, a.disc, cond, h, rank, a.eps);
                grid.push(validate(inv).map_err(usage)?);
            }
        }
    }
    match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> =
                ["g", "d", "disc", "cond", "faltings", "rank", "eps"].iter().map(|s| s.to_string()).collect();
            header.extend(names.iter().map(|n| format!("{n}_ln")));
            w.write_record(&header).map_err(usage)?;
            for inv in &grid {
                let v = inv.get();
                let mut row = vec![
                    v.g.to_string(),
                    v.d.to_string(),
                    v.disc.to_string(),
                    v.cond.to_string(),
                    v.faltings.to_sci_string(report::F64_DIGITS),
                    v.rank.to_string(),
                    v.eps.to_sci_string(report::F64_DIGITS),
                ];
                for n in &names {
                    row.push(match evaluate(n, inv, &cfg).expect("known bound name") {
                        Ok(b) => b.ln_bound.ln().to_sci_string(report::F64_DIGITS),
                        Err(_) => String::new(),
                    });
                }
                w.write_record(&row).map_err(usage)?;
            }
            let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
            out.write_all(&bytes).map_err(usage)?;
        }
        Format::Json | Format::Table => {
            let mut all = Vec::new();
            for inv in &grid {
                for n in &names {
                    let mut v = match evaluate(n, inv, &cfg).expect("known bound name") {
                        Ok(b) => r.bound(&b),
                        Err(e) => r.bound_error(n, inv.get(), &e),
                    };
                    if let Value::Object(m) = &mut v {
                        m.insert("precision".into(), r.precision_field());
                        m.entry("constants").or_insert_with(|| report::constants(&cfg));
                        m.entry("assumptions").or_insert_with(|| Value::Array(Vec::new()));
                    }
                    all.push(v);
                }
            }
            emit(out, &Value::Array(all))?;
        }
    }
    Ok(EXIT_OK)
}

fn bsd<R: ParseReal>(a: &BsdArgs, entries: &[CorpusEntry], r: Renderer, out: &mut dyn Write) -> CliResult {
    let cfg = ConstantsConfig::default();
    let mut t = resolve(&a.curve, entries)?;
    if let Some(g) = &a.gens {
        let pts = corpus::parse_points(g).ok_or_else(|| usage(format!("bad point list `{g}`")))?;
        if let Some(i) = pts.iter().position(|p| !t.curve.input_model().contains(p)) {
            return Err(usage(format!("generator {i} is not on the curve")));
        }
        t.generators = pts;
    }
    if a.lstar.is_some() {
        t.l_star = a.lstar.clone();
    }
    let l_star = match &t.l_star {
        None => None,
        Some(s) => Some(R::parse_real(s).ok_or_else(|| usage(format!("bad leading coefficient `{s}`")))?),
    };
    let tol = a.tol.unwrap_or_else(R::default_tol);
    let terms =
        assemble::<R>(&t.curve, &t.generators, l_star, tol).map_err(|e| failure(r, "bsd", Some(&t.curve), e, &cfg))?;
    let v = r.envelope("bsd", r.bsd_terms(&t.curve, &terms), &cfg, &[Assumption::FE, Assumption::BSD]);
    emit(out, &v)?;
    Ok(EXIT_OK)
}

fn lvalue<R: ParseReal>(a: &LvalueArgs, entries: &[CorpusEntry], r: Renderer, out: &mut dyn Write) -> CliResult {
    let cfg = ConstantsConfig::default();
    let t = resolve(&a.curve, entries)?;
    let tol = a.tol.unwrap_or_else(R::default_tol);
    let lc = leading_coefficient::<R>(&t.curve, tol).map_err(|e| failure(r, "lvalue", Some(&t.curve), e, &cfg))?;
    let mut body = match r.curve(&t.curve) {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    if let Value::Object(m) = r.leading_coefficient(&lc) {
        body.extend(m);
    }
    emit(out, &r.envelope("lvalue", Value::Object(body), &cfg, &[Assumption::FE]))?;
    Ok(EXIT_OK)
}

fn search(a: &SearchArgs, entries: &[CorpusEntry], r: Renderer, out: &mut dyn Write) -> CliResult {
    let cfg = constants(&a.constants)?;
    let t = resolve(&a.curve, entries)?;
    let opts = ManinOptions { rank: a.rank, budget: a.budget, cutoff_override: a.cutoff };
    let (basis, cert) =
        manin_procedure(&t.curve, &cfg, &opts).map_err(|e| failure(r, "search", Some(&t.curve), e, &cfg))?;
    let mut body = match r.curve(&t.curve) {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    if let Value::Object(m) = r.search(&basis, &cert) {
        body.extend(m);
    }
    let tags: &[Assumption] =
        if a.cutoff.is_some() || cert.rank == 0 { &[] } else { &[Assumption::FE, Assumption::BSD, Assumption::MASSER] };
    emit(out, &r.envelope("search", Value::Object(body), &cfg, tags))?;
    Ok(EXIT_OK)
}

fn verify<R: ParseReal>(a: &VerifyArgs, entries: &[CorpusEntry], r: Renderer, out: &mut dyn Write) -> CliResult {
    let cfg = constants(&a.constants)?;
    let tol = a.tol.unwrap_or_else(R::default_tol);
    let mut curves = Vec::new();
    let mut table = String::new();
    let mut failing = Vec::new();
    let mut soft = 0usize;
    for e in entries {
        let c = e.curve();
        let l_star = e.external_l_star.as_deref().and_then(R::parse_real);
        let outcome = assemble::<R>(&c, e.generators(), l_star, tol).and_then(|terms| {
            let inv = curve_invariants(&c, terms.analytic_order)?;
            let rep = verify_against_bounds(&terms, &inv, &cfg)?;
            Ok::<_, BsdError>((terms, rep))
        });
        let mut m = Map::new();
        m.insert("label".into(), Value::String(e.label.clone()));
        match outcome {
            Ok((terms, rep)) => {
                m.insert("analytic_order".into(), Value::from(terms.analytic_order));
                m.insert("sha_predicted".into(), r.real(terms.sha_predicted));
                if let Value::Object(v) = r.verification(&rep) {
                    m.extend(v);
                }
                if !rep.passed_hard() {
                    failing.push(e.label.clone());
                }
                soft += rep.checks.iter().filter(|c| !c.passed).count() - rep.hard_failures().count();
                table.push_str(&report::check_table(&e.label, &rep));
            }
            Err(err) => {
                m.insert("passed_hard".into(), Value::Bool(false));
                m.insert("error".into(), Value::String(err.to_string()));
                failing.push(e.label.clone());
                table.push_str(&format!("{:<8} error: {err}\n", e.label));
            }
        }
        curves.push(Value::Object(m));
    }
    let summary = obj([
        ("curves", Value::from(entries.len())),
        ("failing_curves", Value::Array(failing.iter().cloned().map(Value::String).collect())),
        ("soft_failures", Value::from(soft)),
    ]);
    match a.format {
        Format::Table => {
            table.push_str(&format!(
                "{} curves, {} with hard failures, {soft} soft failures\n",
                entries.len(),
                failing.len()
            ));
            out.write_all(table.as_bytes()).map_err(usage)?;
        }
        _ => {
            let body = obj([("summary", summary), ("results", Value::Array(curves))]);
            let tags = [Assumption::FE, Assumption::BSD, Assumption::MASSER];
            emit(out, &r.envelope("verify", body, &cfg, &tags))?;
        }
    }
    Ok(if failing.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}

fn corpus_cmd(path: Option<&PathBuf>, r: Renderer, out: &mut dyn Write) -> CliResult {
    let cfg = ConstantsConfig::default();
    let text = match path {
        None => corpus::BUNDLED.to_string(),
        Some(p) => std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
    };
    let entries = corpus::parse(&text).map_err(|e| failure(r, "corpus", None, e, &cfg))?;
    let mut mismatches = Vec::new();
    let mut list = Vec::new();
    for e in &entries {
        let c = e.curve();
        let mut m = Map::new();
        m.insert("label".into(), Value::String(e.label.clone()));
        m.insert("conductor".into(), Value::String(c.conductor().to_string()));
        m.insert("torsion_order".into(), Value::from(c.torsion().order()));
        m.insert("tamagawa_product".into(), Value::String(c.tamagawa_product().to_string()));
        if let Some(rk) = e.known_rank {
            m.insert("known_rank".into(), Value::from(rk));
        }
        if let Some(s) = e.known_sha {
            m.insert("known_sha".into(), Value::from(s));
        }
        let mut bad = Vec::new();
        if e.known_conductor.as_ref().is_some_and(|n| n != c.conductor()) {
            bad.push("conductor");
        }
        if e.known_torsion.is_some_and(|t| t != c.torsion().order()) {
            bad.push("torsion");
        }
        if e.known_tamagawa.is_some_and(|t| num_bigint::BigUint::from(t) != c.tamagawa_product()) {
            bad.push("tamagawa");
        }
        if !bad.is_empty() {
            mismatches.push(format!("{}: {}", e.label, bad.join(", ")));
        }
        list.push(Value::Object(m));
    }
    let body = obj([
        ("entries", Value::from(entries.len())),
        ("mismatches", Value::Array(mismatches.iter().cloned().map(Value::String).collect())),
        ("curves", Value::Array(list)),
    ]);
    emit(out, &r.envelope("corpus", body, &cfg, &[]))?;
    Ok(if mismatches.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}
