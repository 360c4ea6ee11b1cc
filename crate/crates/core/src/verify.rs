//! Seeded invariant suites. Every check is exact; a report lists the
//! counterexamples found and how many checks compared nonzero values.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bar::{
    bar_d, bar_shuffle, bar_shuffle_elements, cc_d, ii_eval, ii_eval_reduced, koszul_sign, reduce_cc, shuffles,
    BarElement, BarWord, ScaledForm,
};
use crate::dp::RationalPoly;
use crate::error::{Error, Result};
use crate::form::SimplexForm;
use crate::integrate::{self, BoundSymbol, IntegralSpec, IntegralStep, PrismForm, ReindexedPrism};
use crate::ordinal::{binomial_usize, MaximalChain, OrdinalMap};
use crate::random::{random_path, random_poly, random_simplex_form, trial_rng, FormGenerator, GenParams};
use crate::sform::{iterated_integral_at, stokes_residual, FiberPrism, PathSimplex, SimplicialForm};
use crate::sset::{top_chain_simplex, FiniteSimplicialSet, Simplex};

/// The available suites.
pub const SUITES: &[&str] = &[
    "stokes",
    "naturality",
    "dsquare",
    "ii-cochain",
    "ii-shuffle",
    "bar-d2",
    "embed-oracle",
    "combinatorics",
];

/// Counterexamples kept in a report; further failures are only counted.
pub const MAX_REPORTED_FAILURES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub space: Option<String>,
    pub r: usize,
    pub seed: u64,
    pub trials: usize,
    pub max_exp: u32,
    pub max_deg: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { space: None, r: 1, seed: 0, trials: 20, max_exp: 3, max_deg: 2 }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerifyReport {
    pub command: String,
    pub seed: u64,
    pub trials: usize,
    pub params: Value,
    pub checks: usize,
    pub nontrivial: usize,
    pub by_check: BTreeMap<String, Tally>,
    pub failure_count: usize,
    pub failures: Vec<Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub observations: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Default)]
struct Outcome {
    checks: usize,
    nontrivial: usize,
    failures: Vec<Value>,
    observations: BTreeMap<String, usize>,
    by_check: BTreeMap<String, Tally>,
}

/// Per-check counts in a report.
#[derive(Clone, Copy, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Tally {
    pub checks: usize,
    pub nontrivial: usize,
}

impl Outcome {
    fn observe(&mut self, key: &str, hit: bool) {
        let e = self.observations.entry(key.to_string()).or_insert(0);
        *e += usize::from(hit);
    }

    /// Records one comparison; `nonzero` marks checks that compared nonzero values.
    fn check(&mut self, name: &str, ok: bool, nonzero: bool, payload: impl FnOnce() -> Value) {
        self.checks += 1;
        let tally = self.by_check.entry(name.to_string()).or_default();
        tally.checks += 1;
        if ok && nonzero {
            self.nontrivial += 1;
            tally.nontrivial += 1;
        }
        if !ok {
            let mut p = payload();
            if let Value::Object(m) = &mut p {
                m.insert("check".into(), json!(name));
            }
            self.failures.push(p);
        }
    }

    fn merge(&mut self, other: Outcome) {
        self.checks += other.checks;
        self.nontrivial += other.nontrivial;
        self.failures.extend(other.failures);
        for (k, v) in other.observations {
            *self.observations.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.by_check {
            let t = self.by_check.entry(k).or_default();
            t.checks += v.checks;
            t.nontrivial += v.nontrivial;
        }
    }
}

fn run_trials(cfg: &VerifyConfig, body: impl Fn(u64, &mut ChaCha8Rng) -> Result<Outcome> + Sync) -> Outcome {
    let one = |t: usize| -> Outcome {
        let mut rng = trial_rng(cfg.seed, t as u64);
        match body(t as u64, &mut rng) {
            Ok(mut o) => {
                for f in &mut o.failures {
                    if let Value::Object(m) = f {
                        m.insert("trial".into(), json!(t));
                    }
                }
                o
            }
            Err(e) => Outcome {
                checks: 1,
                failures: vec![json!({ "trial": t, "error": e.to_string() })],
                ..Outcome::default()
            },
        }
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Outcome> = {
        use rayon::prelude::*;
        (0..cfg.trials).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Outcome> = (0..cfg.trials).map(one).collect();
    let mut total = Outcome::default();
    for p in parts {
        total.merge(p);
    }
    total
}

fn finish(name: &str, cfg: &VerifyConfig, params: Value, o: Outcome) -> VerifyReport {
    let failure_count = o.failures.len();
    let mut failures = o.failures;
    failures.truncate(MAX_REPORTED_FAILURES);
    VerifyReport {
        command: name.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        params,
        checks: o.checks,
        nontrivial: o.nontrivial,
        by_check: o.by_check,
        failure_count,
        failures,
        observations: o.observations,
        wall_time_ms: None,
    }
}

/// Runs a suite by name.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<VerifyReport> {
    match name {
        "stokes" => stokes(cfg),
        "naturality" => naturality(cfg),
        "dsquare" => dsquare(cfg),
        "ii-cochain" => ii_cochain(cfg),
        "ii-shuffle" => ii_shuffle(cfg),
        "bar-d2" => bar_d2(cfg),
        "embed-oracle" => embed_oracle(cfg),
        "combinatorics" => combinatorics(cfg),
        other => Err(Error::InvalidArgument(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    }
}

fn space_of(cfg: &VerifyConfig, default: &str) -> Result<Arc<FiniteSimplicialSet>> {
    Ok(Arc::new(FiniteSimplicialSet::preset(cfg.space.as_deref().unwrap_or(default))?))
}

fn params(cfg: &VerifyConfig, space: &str, extra: Value) -> Value {
    let mut v = json!({ "space": space, "r": cfg.r, "max_exp": cfg.max_exp, "max_deg": cfg.max_deg });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

/// `⨍dF − ∮F − (−1)ʳ d⨍F = 0` for random `F` on `X × Δʳ` of degree
/// `r − 1 ≤ q ≤ r − 1 + max_deg`.
pub fn stokes(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.r == 0 {
        return Err(Error::InvalidArgument("stokes needs r ≥ 1".into()));
    }
    let x = space_of(cfg, "simplex:1")?;
    let prod = Arc::new(FiniteSimplicialSet::preset(&format!("product:{}:simplex:{}", x.descriptor(), cfg.r))?);
    let top = prod.max_dim();
    let lo = cfg.r - 1;
    let hi = (lo + cfg.max_deg).min(top);
    let g = FormGenerator::new(prod, GenParams { max_exp: cfg.max_exp, terms: 3 });
    let o = run_trials(cfg, |_, rng| {
        let q = rng.random_range(lo..=hi.max(lo));
        let f = g.form(q, rng);
        let res = stokes_residual(&f)?;
        let mut o = Outcome::default();
        let nonzero = !crate::sform::boundary_int(&f)?.is_zero() || !crate::sform::fiber_int(&f)?.is_zero();
        o.check("stokes", res.is_zero(), nonzero, || json!({ "degree": q, "form": f.to_json(), "residual": res.to_json() }));
        Ok(o)
    });
    Ok(finish("stokes", cfg, params(cfg, x.descriptor(), json!({ "degrees": [lo, hi] })), o))
}

/// `α*⨍ω = ⨍(α × id)*ω` for every `α : [m] -> [n]`, `m, n ≤ 3`, fiber
/// dimensions `0..=r`. A `simplex:n` space restricts `n`.
pub fn naturality(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let ns: Vec<usize> = match cfg.space.as_deref() {
        None => (0..=3).collect(),
        Some(s) => match s.strip_prefix("simplex:").and_then(|n| n.parse().ok()) {
            Some(n) => vec![n],
            None => return Err(Error::InvalidArgument("naturality runs on simplex:n".into())),
        },
    };
    let mut gens = Vec::new();
    for &n in &ns {
        for r in 0..=cfg.r {
            let p = FiniteSimplicialSet::preset(&format!("product:simplex:{n}:simplex:{r}"))?;
            gens.push((n, r, FormGenerator::new(Arc::new(p), GenParams { max_exp: cfg.max_exp, terms: 2 })));
        }
    }
    let o = run_trials(cfg, |_, rng| {
        let mut o = Outcome::default();
        for (n, r, g) in &gens {
            let q = rng.random_range(*r..=n + r);
            let f = g.form(q, rng);
            let prism = FiberPrism::new(&f, *n, 0)?;
            let whole = integrate::fiber_int_simplex(&prism)?;
            for m in 0..=3 {
                for alpha in OrdinalMap::all(m, *n) {
                    let lhs = whole.pullback(&alpha)?;
                    let rhs = integrate::fiber_int_simplex(&ReindexedPrism::along_base(&prism, alpha.clone())?)?;
                    o.check("naturality", lhs == rhs, !lhs.is_zero(), || {
                        json!({ "n": n, "r": r, "alpha": alpha.to_string(), "lhs": lhs.to_text(), "rhs": rhs.to_text() })
                    });
                }
            }
        }
        Ok(o)
    });
    Ok(finish("naturality", cfg, params(cfg, &format!("simplex:{ns:?}"), json!({ "m_max": 3 })), o))
}

/// `d∘d = 0`, Leibniz, and pullbacks as cochain algebra maps on `Δⁿ`,
/// `n ≤ 4`, plus `d∘d = 0` for forms on the chosen space.
pub fn dsquare(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let x = space_of(cfg, "simplex:2")?;
    let g = FormGenerator::new(x.clone(), GenParams { max_exp: cfg.max_exp, terms: 2 });
    let o = run_trials(cfg, |t, rng| {
        let mut o = Outcome::default();
        let n = (t % 5) as usize;
        let p = rng.random_range(0..=n.min(cfg.max_deg));
        let q = rng.random_range(0..=n.min(cfg.max_deg));
        let w = random_simplex_form(n, p, cfg.max_exp, 3, rng);
        let v = random_simplex_form(n, q, cfg.max_exp, 3, rng);
        let dd = w.d().d();
        o.check("d2", dd.is_zero(), !w.d().is_zero(), || json!({ "form": w.to_text() }));
        let lhs = w.wedge(&v).d();
        let rhs = w.d().wedge(&v).add(&w.wedge(&v.d()).scale_sign(if p % 2 == 0 { 1 } else { -1 }));
        o.check("leibniz", lhs == rhs, !lhs.is_zero(), || json!({ "a": w.to_text(), "b": v.to_text() }));
        let m = rng.random_range(0..=4);
        let all = OrdinalMap::all(m, n);
        let alpha = all.choose(rng).expect("maps exist").clone();
        let pw = w.pullback(&alpha)?;
        let lhs = w.wedge(&v).pullback(&alpha)?;
        let rhs = pw.wedge(&v.pullback(&alpha)?);
        o.check("pullback-wedge", lhs == rhs, !lhs.is_zero(), || json!({ "alpha": alpha.to_string() }));
        let lhs = w.d().pullback(&alpha)?;
        o.check("pullback-d", lhs == pw.d(), !lhs.is_zero(), || json!({ "alpha": alpha.to_string() }));
        let beta = OrdinalMap::all(rng.random_range(0..=3), m).choose(rng).expect("maps exist").clone();
        let lhs = pw.pullback(&beta)?;
        let rhs = w.pullback(&alpha.compose(&beta)?)?;
        o.check("functoriality", lhs == rhs, !lhs.is_zero(), || json!({}));
        let f = g.form(rng.random_range(0..=x.max_dim().min(cfg.max_deg)), rng);
        let fd = f.d();
        o.check("space-d2", fd.d().is_zero() && fd.validate().is_ok(), !fd.is_zero(), || json!({ "form": f.to_json() }));
        Ok(o)
    });
    Ok(finish("dsquare", cfg, params(cfg, x.descriptor(), json!({ "n_max": 4 })), o))
}

fn sign_pow(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn deg(f: &SimplicialForm) -> i64 {
    f.degree().unwrap_or(0) as i64
}

/// The right-hand side of the formula for `d(∫ω₁⋯ω_r)` at `φ`.
pub fn ii_differential_rhs(forms: &[SimplicialForm], phi: &PathSimplex) -> Result<SimplexForm> {
    let r = forms.len();
    let n = phi.dim();
    let mut out = SimplexForm::zero(n);
    if r == 0 {
        return Ok(out);
    }
    let degs: Vec<i64> = forms.iter().map(deg).collect();
    for i in 0..r {
        let mut w = forms.to_vec();
        w[i] = w[i].d();
        let e = degs[..i].iter().sum::<i64>() + r as i64;
        out = out.add(&iterated_integral_at(&w, phi)?.scale_sign(sign_pow(e)));
    }
    for i in 0..r - 1 {
        let mut w = forms[..i].to_vec();
        w.push(forms[i].wedge(&forms[i + 1])?);
        w.extend_from_slice(&forms[i + 2..]);
        let e = r as i64 - 2 - i as i64;
        out = out.add(&iterated_integral_at(&w, phi)?.scale_sign(sign_pow(e)));
    }
    let e1 = forms[0].form_at(&phi.endpoint(1)?)?;
    let tail = iterated_integral_at(&forms[1..], phi)?;
    out = out.add(&e1.wedge(&tail).scale_sign(sign_pow((r as i64 - 1) * (degs[0] - 1))));
    let head = iterated_integral_at(&forms[..r - 1], phi)?;
    let e0 = forms[r - 1].form_at(&phi.endpoint(0)?)?;
    Ok(out.sub(&head.wedge(&e0)))
}

fn ii_spaces(cfg: &VerifyConfig, defaults: &[&str]) -> Result<Vec<Arc<FiniteSimplicialSet>>> {
    match &cfg.space {
        Some(s) => Ok(vec![Arc::new(FiniteSimplicialSet::preset(s)?)]),
        None => defaults.iter().map(|s| Ok(Arc::new(FiniteSimplicialSet::preset(s)?))).collect(),
    }
}

/// A path dimension that can carry a form of degree `k`: at least `k`, at
/// most 3 unless `k = 4`.
fn path_dim(k: i64, rng: &mut ChaCha8Rng) -> usize {
    let lo = k.clamp(0, 4) as usize;
    rng.random_range(lo..=lo.max(3))
}

/// A letter degree in `1..=max_deg`, capped by the dimension of the space.
fn letter_degree(g: &FormGenerator, max_deg: usize, rng: &mut ChaCha8Rng) -> usize {
    rng.random_range(1..=max_deg.min(g.space().max_dim()).max(1))
}

fn random_word(g: &FormGenerator, r: usize, max_deg: usize, rng: &mut ChaCha8Rng) -> Result<BarWord> {
    let space = g.space().clone();
    let one = SimplicialForm::one(space.clone());
    let letters = (0..r).map(|_| g.letter(letter_degree(g, max_deg, rng), rng)).collect();
    let end = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { one.clone() } else { g.letter(rng.random_range(0..=1), rng) };
    let left = end(rng);
    let right = end(rng);
    BarWord::new(left, letters, right)
}

/// The differential formula for iterated integrals, `d𝕀 = 𝕀d` on the bar
/// complex, and the same on `CC` at based loops (`sphere:2` carries
/// loops that sweep its 2-cell); `r ≤ --r`, letter degrees ≤ `--max-deg`.
pub fn ii_cochain(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let spaces = ii_spaces(cfg, &["circle", "simplex:2", "sphere:2"])?;
    let gens: Vec<FormGenerator> =
        spaces.iter().map(|x| FormGenerator::new(x.clone(), GenParams { max_exp: cfg.max_exp.min(2), terms: 2 })).collect();
    let o = run_trials(cfg, |_, rng| {
        let mut o = Outcome::default();
        for g in &gens {
            let x = g.space();
            for r in 1..=cfg.r.max(1) {
                let forms: Vec<SimplicialForm> = (0..r).map(|_| g.letter(letter_degree(g, cfg.max_deg, rng), rng)).collect();
                let total: i64 = forms.iter().map(|f| deg(f) - 1).sum();
                let n = path_dim(total + 1, rng);
                let phi = random_path(x, n, rng)?;
                let lhs = iterated_integral_at(&forms, &phi)?.d();
                let rhs = ii_differential_rhs(&forms, &phi)?;
                o.check(&format!("differential-r{r}"), lhs == rhs, !lhs.is_zero(), || {
                    json!({ "space": x.descriptor(), "r": r, "lhs": lhs.to_text(), "rhs": rhs.to_text() })
                });
            }
            let r = rng.random_range(1..=cfg.r.max(1));

            let w = random_word(g, r, cfg.max_deg, rng)?;
            let e = BarElement::word(w);
            let n = path_dim(e.degree().unwrap_or(0) + 1, rng);
            let phi = random_path(x, n, rng)?;
            let lhs = ii_eval(&e, &phi)?.d();
            let rhs = ii_eval(&bar_d(&e)?, &phi)?;
            o.check("cochain", lhs == rhs, !lhs.is_zero(), || {
                json!({ "space": x.descriptor(), "lhs": lhs.to_text(), "rhs": rhs.to_text() })
            });

            // CC at based loops, when the space has them
            let letters: Vec<SimplicialForm> = (0..r).map(|_| g.letter(letter_degree(g, cfg.max_deg, rng), rng)).collect();
            let total: i64 = letters.iter().map(|f| deg(f) - 1).sum();
            let red = reduce_cc(&BarElement::word(BarWord::units(letters, x.clone())?), 0)?;
            let n = path_dim(total + 1, rng);
            if let Some(lp) = loop_at_zero(x, n, rng)? {
                let lhs = ii_eval(&crate::bar::lift_cc(&red)?, &lp)?.d().realize();
                let rhs = ii_eval_reduced(&cc_d(&red)?, &lp)?;
                o.check("cc-cochain", lhs == rhs, !lhs.is_zero(), || json!({ "space": x.descriptor(), "element": red.to_json(), "path": lp.to_json(), "lhs": lhs.to_text(), "rhs": rhs.to_text() }));
            }
        }
        Ok(o)
    });
    let names: Vec<&str> = spaces.iter().map(|s| s.descriptor()).collect();
    Ok(finish("ii-cochain", cfg, params(cfg, &names.join(","), json!({})), o))
}

/// A based loop at vertex 0: a poset path into a maximal cell with all
/// vertices at 0, kept when both ends are degenerate there. Falls back to a
/// loop along a degenerate loop edge.
fn loop_at_zero(x: &Arc<FiniteSimplicialSet>, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<PathSimplex>> {
    let cells: Vec<(usize, usize)> =
        x.maximal_cells().into_iter().filter(|&(m, c)| m >= 1 && x.vertices(m, c).iter().all(|&v| v == 0)).collect();
    if let Some(&(m, c)) = cells.choose(rng) {
        for _ in 0..32 {
            let h = crate::random::random_poset_map(n, m, rng);
            let lp = PathSimplex::from_poset_map(n, &h, x.clone(), &Simplex::cell(m, c))?;
            if lp.is_loop_at(0)? {
                return Ok(Some(lp));
            }
        }
    }
    edge_loop(x, n, rng)
}

/// A path `n`-simplex through a degenerate loop edge `σ*(e)` whose two ends
/// stay in the fibers `σ⁻¹(0)` and `σ⁻¹(1)`.
fn edge_loop(x: &Arc<FiniteSimplicialSet>, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<PathSimplex>> {
    let loops: Vec<usize> =
        (0..x.cells(1).len()).filter(|&e| x.vertices(1, e).iter().all(|&v| v == 0)).collect();
    let Some(&e) = loops.choose(rng) else { return Ok(None) };
    let a = rng.random_range(0..=n);
    let sigma = OrdinalMap::new(1, (0..=n + 1).map(|j| usize::from(j > a)).collect())?;
    let s = x.apply(&Simplex::cell(1, e), &sigma)?;
    let mut bottom: Vec<usize> = (0..=n).map(|_| rng.random_range(0..=a)).collect();
    let mut top: Vec<usize> = (0..=n).map(|_| rng.random_range(a + 1..=n + 1)).collect();
    bottom.sort_unstable();
    top.sort_unstable();
    let h: Vec<[usize; 2]> = bottom.into_iter().zip(top).map(|(b, t)| [b, t]).collect();
    Ok(Some(PathSimplex::from_poset_map(n, &h, x.clone(), &s)?))
}

/// The shuffle formula for products of iterated integrals (`p + q ≤ 4`) and
/// multiplicativity of `𝕀`.
pub fn ii_shuffle(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let spaces = ii_spaces(cfg, &["circle", "simplex:2"])?;
    let gens: Vec<FormGenerator> =
        spaces.iter().map(|x| FormGenerator::new(x.clone(), GenParams { max_exp: cfg.max_exp.min(2), terms: 2 })).collect();
    let o = run_trials(cfg, |_, rng| {
        let mut o = Outcome::default();
        for g in &gens {
            let x = g.space();
            let p = rng.random_range(1..=3);
            let q = rng.random_range(1..=4 - p);
            let forms: Vec<SimplicialForm> = (0..p + q).map(|_| g.letter(letter_degree(g, cfg.max_deg, rng), rng)).collect();
            let total: i64 = forms.iter().map(|f| deg(f) - 1).sum();
            let n = path_dim(total, rng);
            let phi = random_path(x, n, rng)?;
            let lhs = iterated_integral_at(&forms[..p], &phi)?.wedge(&iterated_integral_at(&forms[p..], &phi)?);
            let shifted: Vec<i64> = forms.iter().map(|f| deg(f) - 1).collect();
            let mut rhs = SimplexForm::zero(n);
            let mut literal = SimplexForm::zero(n);
            let mut normalized = ScaledForm::from_form(SimplexForm::zero(n));
            for sigma in shuffles(p, q) {
                let eps = koszul_sign(&sigma, &shifted)?;
                let w: Vec<SimplicialForm> = sigma.iter().map(|&i| forms[i].clone()).collect();
                let v = iterated_integral_at(&w, &phi)?;
                rhs = rhs.add(&v.scale_sign(eps * cross_sign(&sigma, p, &shifted)));
                literal = literal.add(&v.scale_sign(eps));
                let nv = ii_eval(&BarElement::word(BarWord::units(w, x.clone())?), &phi)?;
                normalized = normalized.add(&nv.scale_sign(eps));
            }
            o.check("shuffle", lhs == rhs, !lhs.is_zero(), || {
                json!({ "space": x.descriptor(), "p": p, "q": q, "lhs": lhs.to_text(), "rhs": rhs.to_text() })
            });
            o.observe("literal_sign_mismatch", lhs != literal);
            let unit = |ws: &[SimplicialForm]| -> Result<ScaledForm> {
                ii_eval(&BarElement::word(BarWord::units(ws.to_vec(), x.clone())?), &phi)
            };
            let nl = unit(&forms[..p])?.wedge(&unit(&forms[p..])?)?;
            o.check("shuffle-normalized", nl == normalized, !nl.is_zero(), || {
                json!({ "space": x.descriptor(), "p": p, "q": q, "lhs": nl.to_text(), "rhs": normalized.to_text() })
            });

            let a = random_word(g, p, cfg.max_deg, rng)?;
            let b = random_word(g, q, cfg.max_deg, rng)?;
            let prod = bar_shuffle(&a, &b)?;
            let n = path_dim(prod.degree().unwrap_or(0), rng);
            let phi = random_path(x, n, rng)?;
            let lhs = ii_eval(&prod, &phi)?;
            let rhs = ii_eval(&BarElement::word(a), &phi)?.wedge(&ii_eval(&BarElement::word(b), &phi)?)?;
            o.check("ii-multiplicative", lhs == rhs, !lhs.is_zero(), || {
                json!({ "space": x.descriptor(), "lhs": lhs.to_text(), "rhs": rhs.to_text() })
            });

            // constant paths: 𝕀(f[]h) = f ∧ h, longer words with positive-degree letters vanish
            let s = crate::random::random_simplex(x, rng.random_range(0..=2), rng)?;
            let c = PathSimplex::constant(x.clone(), &s)?;
            let f = g.letter(rng.random_range(0..=1), rng);
            let h = g.letter(0, rng);
            let lhs = ii_eval(&BarElement::word(BarWord::new(f.clone(), vec![], h.clone())?), &c)?;
            let rhs = ScaledForm::from_form(f.wedge(&h)?.form_at(&s)?);
            o.check("constant-path-augmentation", lhs == rhs, !lhs.is_zero(), || json!({}));
            let long = ii_eval(&BarElement::word(random_word(g, p, cfg.max_deg, rng)?), &c)?;
            o.check("constant-path-vanishing", long.is_zero(), false, || json!({}));
        }
        Ok(o)
    });
    let names: Vec<&str> = spaces.iter().map(|s| s.descriptor()).collect();
    Ok(finish("ii-shuffle", cfg, params(cfg, &names.join(","), json!({ "pq_max": 4 })), o))
}

/// `(−1)^{Σ d_earlier}` over pairs of positions holding one letter from each
/// factor: the ratio of the normalizing signs of `𝕀` on both sides of a shuffle.
fn cross_sign(sigma: &[usize], p: usize, shifted: &[i64]) -> i32 {
    let mut e = 0;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if (sigma[i] < p) != (sigma[j] < p) {
                e += shifted[sigma[i]];
            }
        }
    }
    sign_pow(e)
}

fn rat(a: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

/// `d² = 0` on `B𝒜` and `CC`, graded commutativity, associativity and the
/// Leibniz rule for the shuffle product; words of length `≤ 3`.
pub fn bar_d2(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let spaces: Vec<Arc<FiniteSimplicialSet>> = match &cfg.space {
        Some(s) => vec![Arc::new(FiniteSimplicialSet::preset(s)?)],
        None => vec![
            Arc::new(FiniteSimplicialSet::standard(1)?),
            Arc::new(FiniteSimplicialSet::standard(2)?),
            Arc::new(FiniteSimplicialSet::circle()?),
        ],
    };
    let gens: Vec<FormGenerator> =
        spaces.iter().map(|x| FormGenerator::new(x.clone(), GenParams { max_exp: cfg.max_exp.min(2), terms: 2 })).collect();
    let o = run_trials(cfg, |t, rng| {
        let mut o = Outcome::default();
        let g = &gens[t as usize % gens.len()];
        let name = g.space().descriptor().to_string();
        let word = |rng: &mut ChaCha8Rng, rmax: usize| -> Result<BarWord> {
            let r = rng.random_range(0..=rmax);
            let letters = (0..r).map(|_| g.letter(rng.random_range(0..=cfg.max_deg), rng)).collect();
            let left = g.letter(rng.random_range(0..=1), rng);
            let right = g.letter(rng.random_range(0..=1), rng);
            BarWord::new(left, letters, right)
        };
        let w = word(rng, 3)?;
        let e = BarElement::word(w.clone());
        let d1 = bar_d(&e)?;
        let dd = bar_d(&d1)?;
        o.check("bar-d2", dd.is_zero(), !d1.is_zero(), || json!({ "space": name, "word": w.to_json() }));
        let red = reduce_cc(&BarElement::word(BarWord::units(w.letters().to_vec(), w.space().clone())?), 0)?;
        let c1 = cc_d(&red)?;
        o.check("cc-d2", cc_d(&c1)?.is_zero(), !c1.is_zero(), || json!({ "space": name, "word": w.to_json() }));

        let (a, b, c) = (word(rng, 2)?, word(rng, 2)?, word(rng, 1)?);
        let (ea, eb, ec) = (BarElement::word(a.clone()), BarElement::word(b.clone()), BarElement::word(c));
        let ab = bar_shuffle(&a, &b)?;
        let ba = bar_shuffle(&b, &a)?;
        let s = sign_pow(a.degree().unwrap_or(0) * b.degree().unwrap_or(0));
        let diff = ab.sub(&ba.scale(&rat(s as i64)))?;
        o.check("commutative", diff.is_zero(), !ab.is_zero(), || json!({ "space": name }));
        let left = bar_shuffle_elements(&ab, &ec)?;
        let right = bar_shuffle_elements(&ea, &bar_shuffle_elements(&eb, &ec)?)?;
        o.check("associative", left.sub(&right)?.is_zero(), !left.is_zero(), || json!({ "space": name }));
        let lhs = bar_d(&ab)?;
        let sa = sign_pow(a.degree().unwrap_or(0));
        let rhs = bar_shuffle_elements(&bar_d(&ea)?, &eb)?.add(&bar_shuffle_elements(&ea, &bar_d(&eb)?)?.scale(&rat(sa as i64)))?;
        o.check("leibniz", lhs.sub(&rhs)?.is_zero(), !lhs.is_zero(), || json!({ "space": name }));
        Ok(o)
    });
    let names: Vec<&str> = spaces.iter().map(|s| s.descriptor()).collect();
    Ok(finish("bar-d2", cfg, params(cfg, &names.join(","), json!({ "r_max": 3 })), o))
}

fn realize_bound(b: &BoundSymbol, n: usize) -> RationalPoly {
    match *b {
        BoundSymbol::Theta => RationalPoly::constant(n, rat(1)),
        BoundSymbol::Zero => RationalPoly::zero(n),
        BoundSymbol::Var { j } => RationalPoly::var(n, j),
    }
}

fn random_bound(n: usize, avoid: usize, rng: &mut ChaCha8Rng) -> BoundSymbol {
    let mut choices = vec![BoundSymbol::Theta, BoundSymbol::Zero];
    choices.extend((1..=n).filter(|&j| j != avoid).map(|j| BoundSymbol::Var { j }));
    *choices.choose(rng).expect("nonempty")
}

/// Classical integration over `ℚ` after realization reproduces every
/// divided-power integral; the rational embedding is multiplicative.
pub fn embed_oracle(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let o = run_trials(cfg, |t, rng| {
        let mut o = Outcome::default();
        let n = 1 + (t % 4) as usize;
        let f = random_poly(n, cfg.max_exp, 4, rng);
        let g = random_poly(n, cfg.max_exp, 4, rng);
        let lhs = (&f * &g).embed_rational();
        let rhs = f.embed_rational().mul(&g.embed_rational());
        o.check("embed-mul", lhs == rhs, !lhs.is_zero(), || json!({ "f": f.to_text(), "g": g.to_text() }));

        let i = rng.random_range(1..=n);
        let lo = random_bound(n, i, rng);
        let hi = random_bound(n, i, rng);
        let got = integrate::definite_int(&f, i, lo, hi)?.realize();
        let want = f.realize().integrate(i, &realize_bound(&lo, n), &realize_bound(&hi, n));
        o.check("definite", got == want, !got.is_zero(), || {
            json!({ "f": f.to_text(), "var": i, "lo": lo.to_string(), "hi": hi.to_string() })
        });

        // an iterated integral over a random ordering of variables and bounds
        let k = rng.random_range(1..=n);
        let mut vars: Vec<usize> = (1..=n).collect();
        vars.sort_by_key(|_| rng.random::<u32>());
        vars.truncate(k);
        let steps: Vec<IntegralStep> =
            vars.iter().map(|&v| IntegralStep { var: v, lo: random_bound(n, v, rng), hi: random_bound(n, v, rng) }).collect();
        let spec = IntegralSpec { steps: steps.clone() };
        let got = integrate::iterated_int(&f, &spec)?.realize();
        let mut want = f.realize();
        for s in &steps {
            want = want.integrate(s.var, &realize_bound(&s.lo, n), &realize_bound(&s.hi, n));
        }
        o.check("iterated", got == want, !got.is_zero(), || json!({ "f": f.to_text() }));

        // a chain integral on Δ^{b+r}
        let (b, r) = (rng.random_range(0..=2), rng.random_range(1..=2));
        let chain = crate::random::random_chain(b, r, rng);
        let top = random_poly(b + r, cfg.max_exp.min(2), 3, rng);
        let spec = integrate::chain_spec(&chain);
        let got = integrate::iterated_int(&top, &spec)?.realize();
        let mut want = top.realize();
        for s in &spec.steps {
            want = want.integrate(s.var, &realize_bound(&s.lo, b + r), &realize_bound(&s.hi, b + r));
        }
        o.check("chain", got == want, !got.is_zero(), || json!({ "chain": chain.step_string() }));
        Ok(o)
    });
    Ok(finish("embed-oracle", cfg, params(cfg, "-", json!({ "n_max": 4 })), o))
}

/// Chain counts, the chain/top-simplex bijection, and Eilenberg–Zilber
/// strips of degenerate prism forms.
pub fn combinatorics(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut o = Outcome::default();
    for n in 0..=6 {
        for r in 0..=6 {
            let c = MaximalChain::enumerate(n, r).len();
            o.check("chain-count", c == binomial_usize(n + r, r), true, || json!({ "n": n, "r": r, "count": c }));
        }
    }
    for n in 0..=3 {
        for r in 0..=3 {
            let prism = FiniteSimplicialSet::preset(&format!("product:simplex:{n}:simplex:{r}"))?;
            let tops = prism.cells(n + r).len();
            let mut hit = vec![false; tops];
            let mut ok = true;
            for c in MaximalChain::enumerate(n, r) {
                let s = top_chain_simplex(&prism, &c)?;
                ok &= s.is_nondegenerate() && s.cell_dim() == n + r && !std::mem::replace(&mut hit[s.cell], true);
            }
            ok &= hit.iter().all(|&h| h);
            o.check("chain-bijection", ok, true, || json!({ "n": n, "r": r }));
        }
    }
    let ez = run_trials(cfg, |_, rng| {
        let mut o = Outcome::default();
        let k = rng.random_range(0..=2);
        let r = rng.random_range(0..=2);
        let n = k + rng.random_range(1..=2);
        let p = FiniteSimplicialSet::preset(&format!("product:simplex:{k}:simplex:{r}"))?;
        let g = FormGenerator::new(Arc::new(p), GenParams { max_exp: cfg.max_exp.min(2), terms: 2 });
        let f = g.form(rng.random_range(0..=k + r), rng);
        let inner = FiberPrism::new(&f, k, 0)?;
        let surj = OrdinalMap::surjections(n, k);
        let sigma = surj.choose(rng).expect("nonempty").clone();
        let degenerate = ReindexedPrism::along_base(&inner, sigma.clone())?;
        let (s2, iota) = integrate::ez_strip(&degenerate)?;
        // (σ × id)* ω̃ = ω on every chain, and ω̃ admits no further strip
        let stripped = ReindexedPrism::along_base(&degenerate, iota.clone())?;
        let mut same = true;
        for c in MaximalChain::enumerate(n, r) {
            let (gb, gf) = c.projections();
            let back = ReindexedPrism::along_base(&stripped, s2.clone())?;
            same &= back.value(&gb, &gf)? == degenerate.value(&gb, &gf)?;
        }
        let (s3, _) = integrate::ez_strip(&stripped)?;
        same &= s3.is_identity() && iota.source_dim() <= k;
        let via = integrate::fiber_int_simplex(&degenerate)?;
        let direct = integrate::fiber_int_direct(&degenerate)?;
        same &= via == direct;
        o.check("ez-strip", same, !via.is_zero(), || json!({ "k": k, "n": n, "r": r, "sigma": sigma.to_string() }));
        Ok(o)
    });
    o.merge(ez);
    Ok(finish("combinatorics", cfg, params(cfg, "-", json!({ "chain_max": 6, "bijection_max": 3 })), o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::DividedPowerPoly;

    fn cfg(space: Option<&str>, r: usize, trials: usize) -> VerifyConfig {
        VerifyConfig { space: space.map(String::from), r, seed: 7, trials, max_exp: 3, max_deg: 2 }
    }

    #[test]
    fn small_suites_pass() {
        for (name, c) in [
            ("stokes", cfg(Some("boundary:2"), 2, 3)),
            ("naturality", cfg(Some("simplex:2"), 1, 2)),
            ("dsquare", cfg(None, 1, 10)),
            ("ii-cochain", cfg(None, 2, 3)),
            ("ii-shuffle", cfg(None, 1, 3)),
            ("bar-d2", cfg(None, 1, 6)),
            ("embed-oracle", cfg(None, 1, 20)),
            ("combinatorics", cfg(None, 1, 5)),
        ] {
            let rep = run_suite(name, &c).unwrap();
            assert!(rep.passed(), "{name}: {}", serde_json::to_string_pretty(&rep.failures).unwrap());
            assert!(rep.checks > 0);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cfg(Some("circle"), 1, 4);
        let a = serde_json::to_string(&run_suite("stokes", &c).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite("stokes", &c).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &VerifyConfig::default()).is_err());
        assert!(stokes(&cfg(None, 0, 1)).is_err());
    }

    #[test]
    fn differential_formula_single_letter() {
        // r = 1: d∫ω = −∫dω + E₁*ω − E₀*ω
        let x = Arc::new(FiniteSimplicialSet::standard(1).unwrap());
        let f = SimplicialForm::new(
            x.clone(),
            vec![
                vec![SimplexForm::zero(0), SimplexForm::from_poly(DividedPowerPoly::theta_power(0, 1))],
                vec![SimplexForm::from_poly(DividedPowerPoly::var(1, 1))],
            ],
        )
        .unwrap();
        let id = PathSimplex::from_poset_map(0, &[[0, 1]], x, &Simplex::cell(1, 0)).unwrap();
        assert!(ii_differential_rhs(&[f], &id).unwrap().is_zero());
    }
}
