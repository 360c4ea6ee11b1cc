//! The two-sided bar complex of the de Rham algebra of a simplicial set,
//! its shuffle product, the reduced complex `CC`, and the iterated-integral
//! map `𝕀` into forms on the path space.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::dp::{parse_rational, rational_string, DividedPowerPoly, Exps};
use crate::error::{Error, Result};
use crate::form::{DxMask, RationalForm, SimplexForm};
use crate::sform::{iterated_integral_at, PathSimplex, SimplicialForm};
use crate::sset::FiniteSimplicialSet;

fn parity(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Koszul sign of reordering graded elements: `perm[k]` is the original index
/// placed at position `k`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i32> {
    if perm.len() != degrees.len() {
        return Err(Error::DimensionMismatch { expected: degrees.len(), found: perm.len() });
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
    }
    let mut sign = 1;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                sign *= parity(degrees[perm[a]] * degrees[perm[b]]);
            }
        }
    }
    Ok(sign)
}

/// All `(p, q)`-shuffles as orderings of `0..p+q`, in lexicographic order.
pub fn shuffles(p: usize, q: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, j: usize, p: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == p && j == q {
            out.push(cur.clone());
            return;
        }
        if i < p {
            cur.push(i);
            go(i + 1, j, p, q, cur, out);
            cur.pop();
        }
        if j < q {
            cur.push(p + j);
            go(i, j + 1, p, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, 0, p, q, &mut Vec::new(), &mut out);
    out
}

/// Degree of a homogeneous form; zero forms have no degree.
fn degree_of(f: &SimplicialForm) -> Result<Option<i64>> {
    if f.is_zero() {
        return Ok(None);
    }
    f.degree().map(|d| Some(d as i64)).ok_or(Error::NotHomogeneous)
}

/// The representative of a letter modulo global constants: `g − g(v₀) · 1`.
pub fn normalize_letter(g: &SimplicialForm) -> Result<SimplicialForm> {
    if g.degree().is_some_and(|d| d > 0) || g.is_zero() {
        return Ok(g.clone());
    }
    let c = g.at_vertex(0)?;
    g.sub(&SimplicialForm::constant(g.space().clone(), &c)?)
}

/// `ω₀[ω₁|…|ω_r]ω_{r+1}` with letters normalized modulo constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BarWord {
    left: SimplicialForm,
    letters: Vec<SimplicialForm>,
    right: SimplicialForm,
}

impl BarWord {
    pub fn new(left: SimplicialForm, letters: Vec<SimplicialForm>, right: SimplicialForm) -> Result<Self> {
        let space = left.space().clone();
        for f in letters.iter().chain([&right]) {
            if **f.space() != *space {
                return Err(Error::SpaceMismatch(space.descriptor().into(), f.space().descriptor().into()));
            }
        }
        for f in letters.iter().chain([&left, &right]) {
            degree_of(f)?;
        }
        let letters = letters.iter().map(normalize_letter).collect::<Result<Vec<_>>>()?;
        Ok(BarWord { left, letters, right })
    }

    /// `1[g₁|…|g_r]1`.
    pub fn units(letters: Vec<SimplicialForm>, space: Arc<FiniteSimplicialSet>) -> Result<Self> {
        let one = SimplicialForm::one(space);
        Self::new(one.clone(), letters, one)
    }

    pub fn left(&self) -> &SimplicialForm {
        &self.left
    }

    pub fn letters(&self) -> &[SimplicialForm] {
        &self.letters
    }

    pub fn right(&self) -> &SimplicialForm {
        &self.right
    }

    pub fn space(&self) -> &Arc<FiniteSimplicialSet> {
        self.left.space()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.left.is_zero() || self.right.is_zero() || self.letters.iter().any(|g| g.is_zero())
    }

    fn degrees(&self) -> Option<(i64, Vec<i64>, i64)> {
        if self.is_zero() {
            return None;
        }
        let d = |f: &SimplicialForm| f.degree().unwrap_or(0) as i64;
        Some((d(&self.left), self.letters.iter().map(d).collect(), d(&self.right)))
    }

    /// `|ω₀| + Σ(|ωᵢ| − 1) + |ω_{r+1}|`.
    pub fn degree(&self) -> Option<i64> {
        let (f, g, h) = self.degrees()?;
        Some(f + g.iter().map(|x| x - 1).sum::<i64>() + h)
    }

    pub fn to_json(&self) -> Value {
        let strip = |f: &SimplicialForm| f.to_json()["values"].clone();
        json!({
            "left": { "values": strip(&self.left) },
            "letters": self.letters.iter().map(|g| json!({ "values": strip(g) })).collect::<Vec<_>>(),
            "right": { "values": strip(&self.right) },
        })
    }

    /// Parses `{"left", "letters", "right"}`; a form may be the string `"1"`
    /// and missing ends default to `1`.
    pub fn from_json_on(space: &Arc<FiniteSimplicialSet>, v: &Value) -> Result<Self> {
        let form = |x: Option<&Value>| -> Result<SimplicialForm> {
            match x {
                None => Ok(SimplicialForm::one(space.clone())),
                Some(Value::String(s)) if s == "1" => Ok(SimplicialForm::one(space.clone())),
                Some(Value::String(s)) if s == "0" => Ok(SimplicialForm::zero(space.clone())),
                Some(x) => SimplicialForm::from_json_on(space.clone(), x),
            }
        };
        let letters = match v.get("letters") {
            None => Vec::new(),
            Some(Value::Array(a)) => a.iter().map(|x| form(Some(x))).collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::Parse("letters must be an array".into())),
        };
        Self::new(form(v.get("left"))?, letters, form(v.get("right"))?)
    }
}

fn zero_q() -> BigRational {
    BigRational::zero()
}

/// A finite `ℚ`-linear combination of bar words.
#[derive(Clone, Debug)]
pub struct BarElement {
    space: Arc<FiniteSimplicialSet>,
    terms: Vec<(BarWord, BigRational)>,
    index: HashMap<BarWord, usize>,
}

impl BarElement {
    pub fn zero(space: Arc<FiniteSimplicialSet>) -> Self {
        BarElement { space, terms: Vec::new(), index: HashMap::new() }
    }

    pub fn word(w: BarWord) -> Self {
        let mut e = Self::zero(w.space().clone());
        e.add_word(w, BigRational::one());
        e
    }

    pub fn space(&self) -> &Arc<FiniteSimplicialSet> {
        &self.space
    }

    /// Nonzero terms in insertion order.
    pub fn terms(&self) -> impl Iterator<Item = (&BarWord, &BigRational)> {
        self.terms.iter().filter(|(w, c)| !c.is_zero() && !w.is_zero()).map(|(w, c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn add_word(&mut self, w: BarWord, c: BigRational) {
        if c.is_zero() || w.is_zero() {
            return;
        }
        match self.index.get(&w) {
            Some(&i) => self.terms[i].1 += c,
            None => {
                self.index.insert(w.clone(), self.terms.len());
                self.terms.push((w, c));
            }
        }
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(self.space.descriptor().into(), other.space.descriptor().into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_word(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.space.clone());
        for (w, x) in self.terms() {
            out.add_word(w.clone(), x * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// The common degree of all terms.
    pub fn degree(&self) -> Option<i64> {
        let mut d = None;
        for (w, _) in self.terms() {
            let e = w.degree()?;
            if d.is_some_and(|x| x != e) {
                return None;
            }
            d = Some(e);
        }
        d
    }

    /// Exact test for the zero element of the tensor product.
    pub fn is_zero(&self) -> bool {
        let items: Vec<(Vec<Coords>, BigRational)> = self
            .terms()
            .map(|(w, c)| {
                let mut v = vec![coords(&w.left)];
                v.extend(w.letters.iter().map(coords));
                v.push(coords(&w.right));
                (v, c.clone())
            })
            .collect();
        tensor_is_zero(items)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "space": crate::sset::space_to_json(&self.space),
            "terms": self.terms().map(|(w, c)| json!({ "coef": rational_string(c), "word": w.to_json() })).collect::<Vec<_>>(),
        })
    }

    /// Parses `{"space", "terms": [{"coef", "word"}]}` or a single word
    /// `{"space", "left", "letters", "right"}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let space = Arc::new(crate::sset::space_from_json(
            v.get("space").ok_or_else(|| Error::Parse("missing space".into()))?,
        )?);
        let mut out = Self::zero(space.clone());
        match v.get("terms") {
            Some(Value::Array(ts)) => {
                for t in ts {
                    let c = match t.get("coef") {
                        None => BigRational::one(),
                        Some(Value::String(s)) => parse_rational(s)?,
                        Some(Value::Number(n)) => parse_rational(&n.to_string())?,
                        Some(_) => return Err(Error::Parse("coef must be a string or number".into())),
                    };
                    let w = t.get("word").ok_or_else(|| Error::Parse("missing word".into()))?;
                    out.add_word(BarWord::from_json_on(&space, w)?, c);
                }
            }
            Some(_) => return Err(Error::Parse("terms must be an array".into())),
            None => out.add_word(BarWord::from_json_on(&space, v)?, BigRational::one()),
        }
        Ok(out)
    }
}

type Coords = BTreeMap<(usize, usize, DxMask, Exps), BigRational>;

fn coords(f: &SimplicialForm) -> Coords {
    let mut out = BTreeMap::new();
    for (k, level) in f.values().iter().enumerate() {
        for (c, v) in level.iter().enumerate() {
            for (m, p) in v.terms() {
                for (e, x) in p.terms() {
                    out.insert((k, c, *m, e.clone()), BigRational::from_integer(x.clone()));
                }
            }
        }
    }
    out
}

/// Echelon basis: each vector vanishes at the pivots of earlier ones.
struct Echelon {
    basis: Vec<((usize, usize, DxMask, Exps), Coords)>,
}

impl Echelon {
    /// Coefficients of `v` over the basis, extending it when needed.
    fn express(&mut self, v: &Coords) -> Vec<(usize, BigRational)> {
        let mut rem = v.clone();
        let mut out = Vec::new();
        for (j, (pivot, b)) in self.basis.iter().enumerate() {
            let Some(a) = rem.get(pivot).cloned() else { continue };
            let a = a / &b[pivot];
            for (k, x) in b {
                let e = rem.entry(k.clone()).or_insert_with(zero_q);
                *e -= &a * x;
                if e.is_zero() {
                    rem.remove(k);
                }
            }
            out.push((j, a));
        }
        if let Some((pivot, _)) = rem.iter().next() {
            let pivot = pivot.clone();
            out.push((self.basis.len(), BigRational::one()));
            self.basis.push((pivot, rem));
        }
        out
    }
}

/// Whether `Σ c · (v₀ ⊗ v₁ ⊗ ⋯)` vanishes; tensors of different length are
/// independent.
fn tensor_is_zero(items: Vec<(Vec<Coords>, BigRational)>) -> bool {
    let mut by_len: BTreeMap<usize, Vec<(Vec<Coords>, BigRational)>> = BTreeMap::new();
    for (v, c) in items {
        by_len.entry(v.len()).or_default().push((v, c));
    }
    by_len.into_values().all(|group| {
        let refs = group.iter().map(|(v, c)| (v.iter().collect::<Vec<_>>(), c.clone())).collect();
        zero_rec(refs)
    })
}

fn zero_rec(items: Vec<(Vec<&Coords>, BigRational)>) -> bool {
    if items.is_empty() {
        return true;
    }
    if items[0].0.is_empty() {
        return items.iter().fold(zero_q(), |a, (_, c)| a + c).is_zero();
    }
    let mut ech = Echelon { basis: Vec::new() };
    let mut groups: BTreeMap<usize, Vec<(Vec<&Coords>, BigRational)>> = BTreeMap::new();
    for (v, c) in items {
        for (j, a) in ech.express(v[0]) {
            groups.entry(j).or_default().push((v[1..].to_vec(), &c * a));
        }
    }
    groups.into_values().all(zero_rec)
}

fn q(sign: i32) -> BigRational {
    BigRational::from_integer(BigInt::from(sign))
}

/// `ν_i = |g₁| + ⋯ + |g_i| − i`.
fn nu(g: &[i64], i: usize) -> i64 {
    g[..i].iter().map(|x| x - 1).sum()
}

fn bar_d_word(w: &BarWord, out: &mut BarElement) -> Result<()> {
    let Some((f, g, _h)) = w.degrees() else { return Ok(()) };
    let r = w.letters.len();
    let mk = |left: SimplicialForm, letters: Vec<SimplicialForm>, right: SimplicialForm| BarWord::new(left, letters, right);
    // d₁
    out.add_word(mk(w.left.d(), w.letters.clone(), w.right.clone())?, BigRational::one());
    for i in 1..=r {
        let mut letters = w.letters.clone();
        letters[i - 1] = letters[i - 1].d();
        out.add_word(mk(w.left.clone(), letters, w.right.clone())?, q(-parity(f + nu(&g, i - 1))));
    }
    out.add_word(mk(w.left.clone(), w.letters.clone(), w.right.d())?, q(parity(f + nu(&g, r))));
    // d₂
    if r >= 1 {
        out.add_word(mk(w.left.wedge(&w.letters[0])?, w.letters[1..].to_vec(), w.right.clone())?, q(parity(f)));
        for i in 1..r {
            let mut letters = w.letters[..i - 1].to_vec();
            letters.push(w.letters[i - 1].wedge(&w.letters[i])?);
            letters.extend_from_slice(&w.letters[i + 1..]);
            out.add_word(mk(w.left.clone(), letters, w.right.clone())?, q(parity(f + nu(&g, i))));
        }
        out.add_word(
            mk(w.left.clone(), w.letters[..r - 1].to_vec(), w.letters[r - 1].wedge(&w.right)?)?,
            q(parity(f + nu(&g, r - 1) + 1)),
        );
    }
    Ok(())
}

/// The bar differential `d₁ + d₂`.
pub fn bar_d(e: &BarElement) -> Result<BarElement> {
    let mut out = BarElement::zero(e.space.clone());
    for (w, c) in e.terms() {
        let mut part = BarElement::zero(e.space.clone());
        bar_d_word(w, &mut part)?;
        for (x, a) in part.terms() {
            out.add_word(x.clone(), a * c);
        }
    }
    Ok(out)
}

/// The shuffle product of two words.
pub fn bar_shuffle(a: &BarWord, b: &BarWord) -> Result<BarElement> {
    if **a.space() != **b.space() {
        return Err(Error::SpaceMismatch(a.space().descriptor().into(), b.space().descriptor().into()));
    }
    let mut out = BarElement::zero(a.space().clone());
    let (Some((_, ga, ha)), Some((fb, gb, _))) = (a.degrees(), b.degrees()) else { return Ok(out) };
    let (p, qn) = (a.letters.len(), b.letters.len());
    let pre = parity(ha * fb + nu(&ga, p) * fb + ha * nu(&gb, qn));
    let left = a.left.wedge(&b.left)?;
    let right = a.right.wedge(&b.right)?;
    let all: Vec<&SimplicialForm> = a.letters.iter().chain(&b.letters).collect();
    let shifted: Vec<i64> = ga.iter().chain(&gb).map(|d| d - 1).collect();
    for sigma in shuffles(p, qn) {
        let eps = koszul_sign(&sigma, &shifted)?;
        let letters = sigma.iter().map(|&i| all[i].clone()).collect();
        out.add_word(BarWord::new(left.clone(), letters, right.clone())?, q(pre * eps));
    }
    Ok(out)
}

/// Bilinear extension of [`bar_shuffle`].
pub fn bar_shuffle_elements(a: &BarElement, b: &BarElement) -> Result<BarElement> {
    a.check_space(b)?;
    let mut out = BarElement::zero(a.space.clone());
    for (x, c) in a.terms() {
        for (y, d) in b.terms() {
            for (w, e) in bar_shuffle(x, y)?.terms() {
                out.add_word(w.clone(), c * d * e);
            }
        }
    }
    Ok(out)
}

/// A form on `Δⁿ` with rational coefficients, stored as `numer / denom`.
#[derive(Clone, Debug)]
pub struct ScaledForm {
    pub numer: SimplexForm,
    pub denom: BigInt,
}

impl PartialEq for ScaledForm {
    fn eq(&self, other: &Self) -> bool {
        self.numer.scale(&other.denom) == other.numer.scale(&self.denom)
    }
}

impl Eq for ScaledForm {}

impl ScaledForm {
    pub fn from_form(f: SimplexForm) -> Self {
        ScaledForm { numer: f, denom: BigInt::one() }
    }

    pub fn dim(&self) -> usize {
        self.numer.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn d(&self) -> Self {
        ScaledForm { numer: self.numer.d(), denom: self.denom.clone() }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        Ok(ScaledForm { numer: self.numer.try_wedge(&other.numer)?, denom: &self.denom * &other.denom }.reduced())
    }

    pub fn pullback(&self, alpha: &crate::ordinal::OrdinalMap) -> Result<Self> {
        Ok(ScaledForm { numer: self.numer.pullback(alpha)?, denom: self.denom.clone() })
    }

    /// Divides out the content shared by the numerator and the denominator.
    pub fn reduced(self) -> Self {
        let mut g = self.denom.clone();
        for p in self.numer.terms().values() {
            for c in p.terms().values() {
                g = g.gcd(c);
                if g.is_one() {
                    return self;
                }
            }
        }
        if g.is_zero() || g.is_one() {
            return self;
        }
        let numer = SimplexForm::from_terms(
            self.numer.dim(),
            self.numer.terms().iter().map(|(m, p)| {
                let p = DividedPowerPoly::from_terms(p.num_vars(), p.terms().iter().map(|(e, c)| (e.clone(), c / &g)))
                    .expect("same shape");
                (crate::form::mask_indices(*m), p)
            }),
        )
        .expect("same shape");
        let mut denom = &self.denom / &g;
        let numer = if denom.is_negative() {
            denom = -denom;
            numer.neg()
        } else {
            numer
        };
        ScaledForm { numer, denom }
    }

    /// `Σ cᵢ fᵢ` over rational `cᵢ`, with the denominators cleared.
    pub fn combination(dim: usize, parts: &[(BigRational, SimplexForm)]) -> Self {
        let l = parts.iter().fold(BigInt::one(), |l, (c, _)| l.lcm(c.denom()));
        let mut numer = SimplexForm::zero(dim);
        for (c, f) in parts {
            let k = c.numer() * (&l / c.denom());
            numer = numer.add(&f.scale(&k));
        }
        ScaledForm { numer, denom: l }.reduced()
    }

    pub fn add(&self, other: &Self) -> Self {
        let q = |d: &BigInt| BigRational::new(BigInt::one(), d.clone());
        Self::combination(self.dim(), &[(q(&self.denom), self.numer.clone()), (q(&other.denom), other.numer.clone())])
    }

    pub fn scale_sign(&self, sign: i32) -> Self {
        ScaledForm { numer: self.numer.scale_sign(sign), denom: self.denom.clone() }
    }

    pub fn realize(&self) -> RationalForm {
        let inv = BigRational::new(BigInt::one(), self.denom.clone());
        let mut out = RationalForm::zero(self.numer.dim());
        for (m, p) in self.numer.realize().terms() {
            out.add_term(*m, p.scale(&inv));
        }
        out
    }

    pub fn to_text(&self) -> String {
        if self.denom.is_one() {
            self.numer.to_text()
        } else {
            format!("({}) / {}", self.numer.to_text(), self.denom)
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "form": self.numer, "denominator": self.denom.to_string(), "text": self.to_text() })
    }
}

/// `𝕀(w)` at `φ`: `(−1)^{Σ(r−i)(|ωᵢ|−1)} E₁*ω₀ ∧ ∫ω₁⋯ω_r ∧ E₀*ω_{r+1}`.
pub fn ii_word(w: &BarWord, phi: &PathSimplex) -> Result<SimplexForm> {
    let n = phi.dim();
    let Some((_, g, _)) = w.degrees() else { return Ok(SimplexForm::zero(n)) };
    let r = g.len() as i64;
    let exp: i64 = g.iter().enumerate().map(|(i, d)| (r - 1 - i as i64) * (d - 1)).sum();
    let e1 = w.left.form_at(&phi.endpoint(1)?)?;
    let e0 = w.right.form_at(&phi.endpoint(0)?)?;
    let body = iterated_integral_at(&w.letters, phi)?;
    Ok(e1.try_wedge(&body)?.try_wedge(&e0)?.scale_sign(parity(exp)))
}

/// `𝕀(e)` evaluated at a path simplex.
pub fn ii_eval(e: &BarElement, phi: &PathSimplex) -> Result<ScaledForm> {
    if **phi.target() != *e.space {
        return Err(Error::SpaceMismatch(phi.target().descriptor().into(), e.space.descriptor().into()));
    }
    let parts =
        e.terms().map(|(w, c)| Ok((c.clone(), ii_word(w, phi)?))).collect::<Result<Vec<_>>>()?;
    Ok(ScaledForm::combination(phi.dim(), &parts))
}

/// An element of `CC = k ⊗_{𝒜⊗𝒜} B𝒜` over the basepoint `x`: rational
/// combinations of letter lists `[ω₁|…|ω_r]`.
#[derive(Clone, Debug)]
pub struct ReducedBarElement {
    space: Arc<FiniteSimplicialSet>,
    basepoint: usize,
    terms: Vec<(Vec<SimplicialForm>, BigRational)>,
    index: HashMap<Vec<SimplicialForm>, usize>,
}

impl ReducedBarElement {
    pub fn zero(space: Arc<FiniteSimplicialSet>, basepoint: usize) -> Result<Self> {
        if basepoint >= space.cells(0).len() {
            return Err(Error::NotVertex);
        }
        Ok(ReducedBarElement { space, basepoint, terms: Vec::new(), index: HashMap::new() })
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn space(&self) -> &Arc<FiniteSimplicialSet> {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[SimplicialForm], &BigRational)> {
        self.terms
            .iter()
            .filter(|(w, c)| !c.is_zero() && !w.iter().any(|g| g.is_zero()))
            .map(|(w, c)| (w.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Adds `c · [letters]`; letters are normalized modulo constants.
    pub fn add_letters(&mut self, letters: Vec<SimplicialForm>, c: BigRational) -> Result<()> {
        let letters = letters.iter().map(normalize_letter).collect::<Result<Vec<_>>>()?;
        if c.is_zero() || letters.iter().any(|g| g.is_zero()) {
            return Ok(());
        }
        match self.index.get(&letters) {
            Some(&i) => self.terms[i].1 += c,
            None => {
                self.index.insert(letters.clone(), self.terms.len());
                self.terms.push((letters, c));
            }
        }
        Ok(())
    }

    /// Exact zero test in the realized tensor algebra.
    pub fn is_zero(&self) -> bool {
        let realized = |f: &SimplicialForm| -> Coords { f.realized_coords() };
        tensor_is_zero(self.terms().map(|(w, c)| (w.iter().map(realized).collect(), c.clone())).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_letters(w.to_vec(), -c.clone())?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "space": crate::sset::space_to_json(&self.space),
            "basepoint": self.basepoint,
            "terms": self.terms().map(|(w, c)| json!({
                "coef": rational_string(c),
                "letters": w.iter().map(|g| json!({ "values": g.to_json()["values"] })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let space = Arc::new(crate::sset::space_from_json(
            v.get("space").ok_or_else(|| Error::Parse("missing space".into()))?,
        )?);
        let x = v.get("basepoint").and_then(|b| b.as_u64()).unwrap_or(0) as usize;
        let mut out = Self::zero(space.clone(), x)?;
        let terms = v.get("terms").and_then(|t| t.as_array()).ok_or_else(|| Error::Parse("missing terms".into()))?;
        for t in terms {
            let c = match t.get("coef") {
                None => BigRational::one(),
                Some(Value::String(s)) => parse_rational(s)?,
                Some(Value::Number(n)) => parse_rational(&n.to_string())?,
                Some(_) => return Err(Error::Parse("coef must be a string or number".into())),
            };
            let w = BarWord::from_json_on(&space, &json!({ "letters": t.get("letters").cloned().unwrap_or(json!([])) }))?;
            out.add_letters(w.letters, c)?;
        }
        Ok(out)
    }
}

/// The augmentation `ε_x`: the realized degree-0 value at the vertex `x`.
pub fn augmentation(f: &SimplicialForm, x: usize) -> Result<BigRational> {
    if f.degree().is_some_and(|d| d > 0) {
        return Ok(zero_q());
    }
    let v = f.at_vertex(x)?;
    Ok(v.realize().terms().values().next().cloned().unwrap_or_else(zero_q))
}

/// `f[g…]h ↦ ε_x(f) ε_x(h) [g…]`.
pub fn reduce_cc(e: &BarElement, x: usize) -> Result<ReducedBarElement> {
    let mut out = ReducedBarElement::zero(e.space.clone(), x)?;
    for (w, c) in e.terms() {
        let s = augmentation(&w.left, x)? * augmentation(&w.right, x)?;
        out.add_letters(w.letters.clone(), c * s)?;
    }
    Ok(out)
}

/// `1[g…]1` for each term.
pub fn lift_cc(e: &ReducedBarElement) -> Result<BarElement> {
    let mut out = BarElement::zero(e.space.clone());
    for (w, c) in e.terms() {
        out.add_word(BarWord::units(w.to_vec(), e.space.clone())?, c.clone());
    }
    Ok(out)
}

/// The differential of `CC`: lift, apply `bar_d`, reduce.
pub fn cc_d(e: &ReducedBarElement) -> Result<ReducedBarElement> {
    reduce_cc(&bar_d(&lift_cc(e)?)?, e.basepoint)
}

/// `𝕀` on `CC`, realized: `Σ c · (−1)^{…} ∫ω₁⋯ω_r` at `φ`.
pub fn ii_eval_reduced(e: &ReducedBarElement, phi: &PathSimplex) -> Result<RationalForm> {
    Ok(ii_eval(&lift_cc(e)?, phi)?.realize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::mask_from_indices;
    use crate::random::{trial_rng, FormGenerator, GenParams};
    use crate::sset::Simplex;

    fn arc(s: &str) -> Arc<FiniteSimplicialSet> {
        Arc::new(FiniteSimplicialSet::preset(s).unwrap())
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    /// `dx₁` on the circle's edge.
    fn circle_dx(c: &Arc<FiniteSimplicialSet>) -> SimplicialForm {
        SimplicialForm::new(c.clone(), vec![vec![SimplexForm::zero(0)], vec![SimplexForm::dx(1, 1)]]).unwrap()
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 1]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[2, 0, 1], &[2, 4, 0]).unwrap(), 1);
        assert_eq!(koszul_sign(&[2, 1, 0], &[1, 1, 1]).unwrap(), -1);
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
        assert!(koszul_sign(&[0], &[1, 1]).is_err());
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(2, 2).len(), 6);
        assert_eq!(shuffles(3, 0), vec![vec![0, 1, 2]]);
        assert_eq!(shuffles(1, 1), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn letters_modulo_constants() {
        let x = arc("simplex:1");
        let one = SimplicialForm::one(x.clone());
        assert!(normalize_letter(&one).unwrap().is_zero());
        let w = BarWord::units(vec![one], x.clone()).unwrap();
        assert!(w.is_zero());
        assert!(BarElement::word(w).is_empty());
    }

    #[test]
    fn differential_of_single_letter() {
        let c = arc("circle");
        let g = circle_dx(&c);
        let one = SimplicialForm::one(c.clone());
        let d = bar_d(&BarElement::word(BarWord::units(vec![g.clone()], c.clone()).unwrap())).unwrap();
        let mut expected = BarElement::zero(c.clone());
        expected.add_word(BarWord::units(vec![g.d()], c.clone()).unwrap(), rat(-1, 1));
        expected.add_word(BarWord::new(g.clone(), vec![], one.clone()).unwrap(), rat(1, 1));
        expected.add_word(BarWord::new(one, vec![], g).unwrap(), rat(-1, 1));
        assert!(d.sub(&expected).unwrap().is_zero());
        assert!(bar_d(&d).unwrap().is_zero());
    }

    #[test]
    fn empty_word_with_constant_ends_is_closed() {
        let x = arc("simplex:2");
        let e = BarElement::word(BarWord::units(vec![], x).unwrap());
        assert!(bar_d(&e).unwrap().is_zero());
    }

    #[test]
    fn shuffle_of_one_forms() {
        let c = arc("circle");
        let g1 = circle_dx(&c);
        let g2 = circle_dx(&c).scale(&BigInt::from(3));
        let a = BarWord::units(vec![g1.clone()], c.clone()).unwrap();
        let b = BarWord::units(vec![g2.clone()], c.clone()).unwrap();
        let s = bar_shuffle(&a, &b).unwrap();
        let mut expected = BarElement::zero(c.clone());
        expected.add_word(BarWord::units(vec![g1.clone(), g2.clone()], c.clone()).unwrap(), rat(1, 1));
        expected.add_word(BarWord::units(vec![g2, g1.clone()], c.clone()).unwrap(), rat(1, 1));
        assert!(s.sub(&expected).unwrap().is_zero());
        // word ∧ empty word only multiplies ends
        let f = SimplicialForm::constant(c.clone(), &DividedPowerPoly::theta_power(0, 1)).unwrap();
        let e = BarWord::new(f.clone(), vec![], f.clone()).unwrap();
        let s = bar_shuffle(&a, &e).unwrap();
        let w = BarWord::new(f.clone(), vec![g1.clone()], f).unwrap();
        assert!(s.sub(&BarElement::word(w)).unwrap().is_zero());
    }

    #[test]
    fn tensor_zero_uses_multilinearity() {
        let c = arc("circle");
        let g = circle_dx(&c);
        let two_g = g.scale(&BigInt::from(2));
        let mut e = BarElement::zero(c.clone());
        e.add_word(BarWord::units(vec![two_g.clone(), g.clone()], c.clone()).unwrap(), rat(1, 2));
        e.add_word(BarWord::units(vec![g.clone(), two_g], c.clone()).unwrap(), rat(-1, 2));
        assert!(e.len() == 2 && e.is_zero());
        let mut e = BarElement::zero(c.clone());
        e.add_word(BarWord::units(vec![g.clone()], c.clone()).unwrap(), rat(1, 1));
        assert!(!e.is_zero());
    }

    #[test]
    fn ii_examples() {
        let c = arc("circle");
        let g = circle_dx(&c);
        let lp = PathSimplex::from_poset_map(0, &[[0, 1]], c.clone(), &Simplex::cell(1, 0)).unwrap();
        let e = BarElement::word(BarWord::units(vec![g.clone()], c.clone()).unwrap());
        let v = ii_eval(&e, &lp).unwrap();
        assert_eq!(v, ScaledForm::from_form(SimplexForm::from_poly(DividedPowerPoly::theta_power(0, 1))));
        // empty word: E₁*f ∧ E₀*h
        let x = arc("simplex:1");
        let f = SimplicialForm::new(
            x.clone(),
            vec![
                vec![SimplexForm::zero(0), SimplexForm::from_poly(DividedPowerPoly::theta_power(0, 1))],
                vec![SimplexForm::from_poly(DividedPowerPoly::var(1, 1))],
            ],
        )
        .unwrap();
        let id = PathSimplex::from_poset_map(0, &[[0, 1]], x.clone(), &Simplex::cell(1, 0)).unwrap();
        let one = SimplicialForm::one(x.clone());
        let left = ii_eval(&BarElement::word(BarWord::new(f.clone(), vec![], one.clone()).unwrap()), &id).unwrap();
        assert_eq!(left.numer, SimplexForm::from_poly(DividedPowerPoly::theta_power(0, 1)));
        let right = ii_eval(&BarElement::word(BarWord::new(one, vec![], f).unwrap()), &id).unwrap();
        assert!(right.is_zero());
    }

    #[test]
    fn reduced_examples() {
        let c = arc("circle");
        let g = circle_dx(&c);
        let e = BarElement::word(BarWord::units(vec![g.clone()], c.clone()).unwrap());
        let r = reduce_cc(&e, 0).unwrap();
        assert_eq!(r.len(), 1);
        assert!(cc_d(&r).unwrap().is_zero());
        assert!(matches!(reduce_cc(&e, 3), Err(Error::NotVertex)));
    }

    #[test]
    fn scaled_forms() {
        let f = SimplexForm::dx(1, 1);
        let a = ScaledForm::combination(1, &[(rat(1, 2), f.clone()), (rat(1, 3), f.clone())]);
        let b = ScaledForm::combination(1, &[(rat(5, 6), f.clone())]);
        assert_eq!(a, b);
        assert_eq!(a.denom, BigInt::from(6));
        let r = a.realize();
        assert_eq!(r.terms()[&mask_from_indices(&[1])].terms()[&vec![0, 0]], rat(5, 6));
    }

    #[test]
    fn random_d_squared() {
        for name in ["simplex:1", "simplex:2", "circle"] {
            let x = arc(name);
            let g = FormGenerator::new(x.clone(), GenParams { max_exp: 2, terms: 2 });
            for t in 0..6 {
                let mut rng = trial_rng(21, t);
                let r = (t % 4) as usize;
                let letters: Vec<_> = (0..r).map(|i| g.letter((i + t as usize) % 3, &mut rng)).collect();
                let w = BarWord::new(g.form(t as usize % 2, &mut rng), letters, g.form(0, &mut rng)).unwrap();
                let e = BarElement::word(w);
                let dd = bar_d(&bar_d(&e).unwrap()).unwrap();
                assert!(dd.is_zero(), "{name} trial {t}");
                let red = reduce_cc(&e, 0).unwrap();
                assert!(cc_d(&cc_d(&red).unwrap()).unwrap().is_zero(), "cc {name} trial {t}");
            }
        }
    }

    #[test]
    fn ii_cochain_and_multiplicative() {
        use crate::random::random_path;
        let (mut nontrivial_d, mut nontrivial_m) = (0, 0);
        for name in ["circle", "simplex:2"] {
            let x = arc(name);
            let g = FormGenerator::new(x.clone(), GenParams { max_exp: 2, terms: 2 });
            let one = SimplicialForm::one(x.clone());
            for t in 0..8u64 {
                let mut rng = trial_rng(5, t);
                let r = (t % 3) as usize + 1;
                let letters: Vec<_> = (0..r).map(|i| g.letter(1 + usize::from(i == 1 && t % 4 == 1), &mut rng)).collect();
                let left = if t % 3 == 0 { one.clone() } else { g.letter((t % 2) as usize, &mut rng) };
                let right = if t % 3 == 1 { one.clone() } else { g.letter(0, &mut rng) };
                let w = BarWord::new(left, letters, right).unwrap();
                let e = BarElement::word(w.clone());
                let de = bar_d(&e).unwrap();
                let n = (e.degree().unwrap_or(0) + 1).clamp(1, 3) as usize;
                let phi = random_path(&x, n, &mut rng).unwrap();
                let lhs = ii_eval(&e, &phi).unwrap().d();
                assert_eq!(lhs, ii_eval(&de, &phi).unwrap(), "cochain {name} t={t}");
                nontrivial_d += usize::from(!lhs.is_zero());

                let w2 = BarWord::units(vec![g.letter(1, &mut rng)], x.clone()).unwrap();
                let prod = bar_shuffle(&w, &w2).unwrap();
                let n = prod.degree().unwrap_or(0).clamp(0, 3) as usize;
                let phi = random_path(&x, n, &mut rng).unwrap();
                let a = ii_eval(&BarElement::word(w.clone()), &phi).unwrap();
                let b = ii_eval(&BarElement::word(w2), &phi).unwrap();
                let lhs = ii_eval(&prod, &phi).unwrap();
                assert_eq!(lhs, a.wedge(&b).unwrap(), "multiplicative {name} t={t}");
                nontrivial_m += usize::from(!lhs.is_zero());
            }
        }
        assert!(nontrivial_d >= 4 && nontrivial_m >= 4, "{nontrivial_d} {nontrivial_m}");
    }
}
