//! The `dpforms` command line: JSON operands in, JSON results out.
//!
//! Exit codes: `0` success, `1` a verification suite found counterexamples,
//! `2` malformed input or usage.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dpforms::bar::{self, BarElement, ReducedBarElement};
use dpforms::integrate::{self, BoundSymbol, IntegralSpec, IntegralStep};
use dpforms::sset::space_from_json;
use dpforms::verify::{self, VerifyConfig};
use dpforms::{
    CoeffImage, CoeffTarget, DividedPowerPoly, FiniteSimplicialSet, MaximalChain, OrdinalMap, PathSimplex,
    SimplexForm, SimplicialForm,
};

#[derive(Parser, Debug)]
#[command(name = "dpforms", version, about = "Exact divided-power de Rham calculus on simplicial sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Io {
    /// Operand JSON file; stdin when omitted.
    #[arg(long, short = 'i', global = true)]
    input: Option<PathBuf>,
    /// Also write the JSON result to this path.
    #[arg(long, short = 'o', global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Divided-power polynomial arithmetic.
    Dp {
        #[command(subcommand)]
        op: DpOp,
        #[command(flatten)]
        io: Io,
    },
    /// Forms on a standard simplex.
    Form {
        #[command(subcommand)]
        op: FormOp,
        #[command(flatten)]
        io: Io,
    },
    /// Integration of polynomials and forms.
    Int {
        #[command(subcommand)]
        op: IntOp,
        #[command(flatten)]
        io: Io,
    },
    /// Finite simplicial sets.
    Sset {
        #[command(subcommand)]
        op: SsetOp,
        #[command(flatten)]
        io: Io,
    },
    /// Iterated integrals at a path simplex.
    Ii {
        #[command(subcommand)]
        op: IiOp,
        #[command(flatten)]
        io: Io,
    },
    /// The two-sided bar complex and its reduced quotient.
    Bar {
        #[command(subcommand)]
        op: BarOp,
        #[command(flatten)]
        io: Io,
    },
    /// Seeded invariant suites.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum DpOp {
    /// `{"a", "b"}` -> a·b
    Mul,
    /// `{"f", "alpha"}` -> α*f
    Pullback,
    /// `{"f", "i"}` -> ∂f/∂x_i
    Partial,
    /// `{"f"}` -> the rational polynomial with x^[N] = xᴺ/N!
    Embed,
    /// `{"f", "target"}` -> image under a coefficient change
    CoeffChange,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum FormOp {
    /// `{"a", "b"}` -> a ∧ b
    Wedge,
    /// `{"form"}` -> dω
    D,
    /// `{"form", "alpha"}` -> α*ω
    Pullback,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum IntOp {
    /// `{"f", "i", "lo", "hi"}` -> ∫_lo^hi f dx_i
    Definite,
    /// `{"f", "steps": [{"var", "lo", "hi"}]}`, innermost first
    Iterated,
    /// `{"form", "chain"}` -> the chain integral over Δʳ ⋊ Γ
    Chain,
    /// `{"form"}` on X × Δʳ -> the fiberwise integral on X
    Fiber,
    /// `{"form"}` on X × Δʳ -> the boundary fiberwise integral on X
    Boundary,
}

#[derive(Subcommand, Debug, Clone)]
enum SsetOp {
    /// Prints the explicit cell structure of a preset or explicit space.
    Build {
        #[arg(long)]
        space: Option<String>,
    },
    /// Cell counts, maximal cells and Euler characteristic.
    Info {
        #[arg(long)]
        space: Option<String>,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum IiOp {
    /// `{"forms": [...], "path"}` -> ∫ω₁⋯ω_r at the path simplex
    Eval,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum BarOp {
    /// A bar element -> its differential
    D,
    /// `{"space", "a", "b"}` -> the shuffle product
    Shuffle,
    /// `{"space", "element", "path"}` -> 𝕀 at the path simplex
    IiEval,
    /// A reduced element, or `{"element", "basepoint"}` -> its differential in CC
    CcD,
}

#[derive(Args, Debug, Clone)]
struct VerifyArgs {
    /// stokes, naturality, dsquare, ii-cochain, ii-shuffle, bar-d2, embed-oracle or combinatorics
    suite: String,
    #[arg(long)]
    space: Option<String>,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long = "max-exp", default_value_t = 3)]
    max_exp: u32,
    #[arg(long = "max-deg", default_value_t = 2)]
    max_deg: usize,
    /// Write the JSON report to this path as well.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// Include wall time in the report; reports are otherwise byte-identical per seed.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Failed(Value),
}

impl From<dpforms::Error> for CliError {
    fn from(e: dpforms::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Runs the command line with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (result, out) = dispatch(cli, stdin);
    match result {
        Ok(v) => emit(&v, out.as_ref(), stdout, stderr).unwrap_or(2),
        Err(CliError::Failed(v)) => match emit(&v, out.as_ref(), stdout, stderr) {
            Some(_) => 1,
            None => 2,
        },
        Err(CliError::Input(msg)) => {
            let _ = writeln!(stderr, "{}", json!({ "error": msg }));
            2
        }
    }
}

fn emit(v: &Value, out: Option<&PathBuf>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Option<i32> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    if let Some(p) = out {
        if let Err(e) = std::fs::write(p, &text) {
            let _ = writeln!(stderr, "{}", json!({ "error": format!("cannot write {}: {e}", p.display()) }));
            return None;
        }
    }
    stdout.write_all(text.as_bytes()).ok()?;
    Some(0)
}

fn dispatch(cli: Cli, stdin: &mut dyn Read) -> (CliResult<Value>, Option<PathBuf>) {
    match cli.command {
        Command::Verify(a) => {
            let out = a.out.clone();
            (run_verify(&a), out)
        }
        Command::Sset { op, io } => {
            let out = io.out.clone();
            (sset_cmd(op, &io, stdin), out)
        }
        Command::Dp { op, io } => with_input(&io, stdin, |v| dp_cmd(op, &v)),
        Command::Form { op, io } => with_input(&io, stdin, |v| form_cmd(op, &v)),
        Command::Int { op, io } => with_input(&io, stdin, |v| int_cmd(op, &v)),
        Command::Ii { op: IiOp::Eval, io } => with_input(&io, stdin, |v| ii_eval(&v)),
        Command::Bar { op, io } => with_input(&io, stdin, |v| bar_cmd(op, &v)),
    }
}

fn with_input(io: &Io, stdin: &mut dyn Read, f: impl FnOnce(Value) -> CliResult<Value>) -> (CliResult<Value>, Option<PathBuf>) {
    (read_input(io, stdin).and_then(f), io.out.clone())
}

fn read_input(io: &Io, stdin: &mut dyn Read) -> CliResult<Value> {
    let mut text = String::new();
    match &io.input {
        Some(p) => text = std::fs::read_to_string(p).map_err(|e| bad(format!("cannot read {}: {e}", p.display())))?,
        None => {
            stdin.read_to_string(&mut text).map_err(|e| bad(format!("cannot read stdin: {e}")))?;
        }
    }
    serde_json::from_str(&text).map_err(|e| bad(format!("malformed JSON: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn typed<T: for<'de> serde::Deserialize<'de>>(v: &Value, key: &str) -> CliResult<T> {
    serde_json::from_value(field(v, key)?.clone()).map_err(|e| bad(format!("field {key:?}: {e}")))
}

fn index(v: &Value, key: &str) -> CliResult<usize> {
    field(v, key)?.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("field {key:?} must be a nonnegative integer")))
}

/// A polynomial given as JSON or as text; text uses the top-level `"n"` when present.
fn poly(v: &Value, key: &str) -> CliResult<DividedPowerPoly> {
    match field(v, key)? {
        Value::String(s) => {
            let n = v.get("n").and_then(Value::as_u64).map(|n| n as usize);
            Ok(DividedPowerPoly::parse(s, n)?)
        }
        _ => typed(v, key),
    }
}

fn bound(v: &Value, key: &str) -> CliResult<BoundSymbol> {
    match field(v, key)? {
        Value::String(s) => Ok(s.parse()?),
        Value::Number(n) if n.as_u64() == Some(0) => Ok(BoundSymbol::Zero),
        _ => typed(v, key),
    }
}

fn poly_json(p: &DividedPowerPoly) -> Value {
    json!({ "poly": p, "text": p.to_text(), "realized": p.realize().to_text() })
}

fn form_json(f: &SimplexForm) -> Value {
    json!({ "form": f, "text": f.to_text(), "realized": f.realize().to_text() })
}

fn dp_cmd(op: DpOp, v: &Value) -> CliResult<Value> {
    Ok(match op {
        DpOp::Mul => {
            let (a, b) = (poly(v, "a")?, poly(v, "b")?);
            poly_json(&a.try_mul(&b)?)
        }
        DpOp::Pullback => {
            let alpha: OrdinalMap = typed(v, "alpha")?;
            poly_json(&poly(v, "f")?.pullback(&alpha)?)
        }
        DpOp::Partial => poly_json(&poly(v, "f")?.partial(index(v, "i")?)?),
        DpOp::Embed => {
            let r = poly(v, "f")?.embed_rational();
            json!({ "rational": r, "text": r.to_text() })
        }
        DpOp::CoeffChange => {
            let target = coeff_target(field(v, "target")?)?;
            let img = poly(v, "f")?.coeff_change(target)?;
            let (kind, value) = match &img {
                CoeffImage::Divided(p) => ("divided", serde_json::to_value(p).expect("serializable")),
                CoeffImage::DividedRational(p) => ("divided-rational", json!(p.to_text())),
                CoeffImage::Rational(p) => ("rational", serde_json::to_value(p).expect("serializable")),
            };
            json!({ "kind": kind, "value": value, "text": img.to_text() })
        }
    })
}

fn coeff_target(v: &Value) -> CliResult<CoeffTarget> {
    if let Value::String(s) = v {
        return match s.as_str() {
            "rational-divided" => Ok(CoeffTarget::RationalDivided),
            "drop-theta" => Ok(CoeffTarget::DropTheta),
            "field-realization" => Ok(CoeffTarget::FieldRealization),
            other => match other.strip_prefix("localized:").and_then(|p| p.parse().ok()) {
                Some(p) => Ok(CoeffTarget::LocalizedAtPrime { p }),
                None => Err(bad(format!("unknown coefficient target {other:?}"))),
            },
        };
    }
    serde_json::from_value(v.clone()).map_err(|e| bad(format!("target: {e}")))
}

fn form_cmd(op: FormOp, v: &Value) -> CliResult<Value> {
    Ok(match op {
        FormOp::Wedge => {
            let (a, b): (SimplexForm, SimplexForm) = (typed(v, "a")?, typed(v, "b")?);
            form_json(&a.try_wedge(&b)?)
        }
        FormOp::D => form_json(&typed::<SimplexForm>(v, "form")?.d()),
        FormOp::Pullback => {
            let f: SimplexForm = typed(v, "form")?;
            form_json(&f.pullback(&typed(v, "alpha")?)?)
        }
    })
}

fn int_cmd(op: IntOp, v: &Value) -> CliResult<Value> {
    Ok(match op {
        IntOp::Definite => {
            let f = poly(v, "f")?;
            poly_json(&integrate::definite_int(&f, index(v, "i")?, bound(v, "lo")?, bound(v, "hi")?)?)
        }
        IntOp::Iterated => {
            let f = poly(v, "f")?;
            let steps = field(v, "steps")?.as_array().ok_or_else(|| bad("steps must be an array"))?;
            let steps = steps
                .iter()
                .map(|s| Ok(IntegralStep { var: index(s, "var")?, lo: bound(s, "lo")?, hi: bound(s, "hi")? }))
                .collect::<CliResult<Vec<_>>>()?;
            poly_json(&integrate::iterated_int(&f, &IntegralSpec { steps })?)
        }
        IntOp::Chain => {
            let f: SimplexForm = typed(v, "form")?;
            let chain: MaximalChain = typed(v, "chain")?;
            form_json(&integrate::chain_int(&f, &chain)?)
        }
        IntOp::Fiber | IntOp::Boundary => {
            let f = SimplicialForm::from_json(field(v, "form")?)?;
            let g = if matches!(op, IntOp::Fiber) {
                dpforms::sform::fiber_int(&f)?
            } else {
                dpforms::sform::boundary_int(&f)?
            };
            json!({ "form": g.to_json() })
        }
    })
}

fn sset_cmd(op: SsetOp, io: &Io, stdin: &mut dyn Read) -> CliResult<Value> {
    let (SsetOp::Build { space } | SsetOp::Info { space }) = &op;
    let x = match space {
        Some(s) => FiniteSimplicialSet::preset(s)?,
        None => {
            let v = read_input(io, stdin)?;
            space_from_json(v.get("space").unwrap_or(&v))?
        }
    };
    Ok(match op {
        SsetOp::Build { .. } => x.to_json(),
        SsetOp::Info { .. } => {
            let counts = x.counts();
            let euler: i64 = counts.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
            json!({
                "descriptor": x.descriptor(),
                "dim": x.max_dim(),
                "counts": counts,
                "maximal_cells": x.maximal_cells(),
                "euler_characteristic": euler,
                "nerve": x.is_nerve(),
            })
        }
    })
}

/// Forms are parsed on the top-level `"space"` when given, else on their own.
fn forms_on(v: &Value, space: Option<&Arc<FiniteSimplicialSet>>) -> CliResult<Vec<SimplicialForm>> {
    let list = field(v, "forms")?.as_array().ok_or_else(|| bad("forms must be an array"))?;
    list.iter()
        .map(|f| match (space, f.get("space")) {
            (Some(x), None) => Ok(SimplicialForm::from_json_on(x.clone(), f)?),
            _ => Ok(SimplicialForm::from_json(f)?),
        })
        .collect()
}

fn top_space(v: &Value) -> CliResult<Option<Arc<FiniteSimplicialSet>>> {
    v.get("space").map(|s| Ok(Arc::new(space_from_json(s)?))).transpose()
}

fn ii_eval(v: &Value) -> CliResult<Value> {
    let path = PathSimplex::from_json(field(v, "path")?)?;
    let space = top_space(v)?.unwrap_or_else(|| path.target().clone());
    let forms = forms_on(v, Some(&space))?;
    Ok(form_json(&dpforms::sform::iterated_integral_at(&forms, &path)?))
}

/// A bar element from `v[key]`, inheriting the top-level space.
fn element(v: &Value, key: &str) -> CliResult<BarElement> {
    let mut e = field(v, key)?.clone();
    if let (Value::Object(m), Some(s)) = (&mut e, v.get("space")) {
        m.entry("space").or_insert_with(|| s.clone());
    }
    Ok(BarElement::from_json(&e)?)
}

fn bar_cmd(op: BarOp, v: &Value) -> CliResult<Value> {
    Ok(match op {
        BarOp::D => {
            let e = if v.get("element").is_some() { element(v, "element")? } else { BarElement::from_json(v)? };
            bar::bar_d(&e)?.to_json()
        }
        BarOp::Shuffle => {
            let (a, b) = (element(v, "a")?, element(v, "b")?);
            bar::bar_shuffle_elements(&a, &b)?.to_json()
        }
        BarOp::IiEval => {
            let e = element(v, "element")?;
            let path = PathSimplex::from_json(field(v, "path")?)?;
            let s = bar::ii_eval(&e, &path)?;
            json!({ "value": s.to_json(), "realized": s.realize().to_text() })
        }
        BarOp::CcD => {
            let e = if v.get("element").is_some() {
                let x = v.get("basepoint").and_then(Value::as_u64).unwrap_or(0) as usize;
                bar::reduce_cc(&element(v, "element")?, x)?
            } else {
                ReducedBarElement::from_json(v)?
            };
            bar::cc_d(&e)?.to_json()
        }
    })
}

fn run_verify(a: &VerifyArgs) -> CliResult<Value> {
    let cfg = VerifyConfig {
        space: a.space.clone(),
        r: a.r,
        seed: a.seed,
        trials: a.trials,
        max_exp: a.max_exp,
        max_deg: a.max_deg,
    };
    let start = Instant::now();
    let mut report = verify::run_suite(&a.suite, &cfg)?;
    if a.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    let v = serde_json::to_value(&report).expect("serializable");
    if report.passed() {
        Ok(v)
    } else {
        Err(CliError::Failed(v))
    }
}

