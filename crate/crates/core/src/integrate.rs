//! Iterated integration of divided-power polynomials and fiberwise
//! integration over prisms `Δⁿ × Δʳ`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dp::DividedPowerPoly;
use crate::error::{Error, Result};
use crate::form::SimplexForm;
use crate::ordinal::{MaximalChain, OrdinalMap};

/// An integration bound: `ϑ`, a variable `x_j`, or `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum BoundSymbol {
    Theta,
    Var { j: usize },
    Zero,
}

impl BoundSymbol {
    /// `bound^[k]` in `ℤ⟨ϑ, x₁, …, xₙ⟩`.
    fn divided_power(self, num_vars: usize, k: u32) -> Result<DividedPowerPoly> {
        Ok(match self {
            BoundSymbol::Theta => DividedPowerPoly::theta_power(num_vars, k),
            BoundSymbol::Var { j } => {
                if j == 0 || j > num_vars {
                    return Err(Error::VariableOutOfRange { index: j, num_vars });
                }
                DividedPowerPoly::var_power(num_vars, j, k)
            }
            BoundSymbol::Zero if k == 0 => DividedPowerPoly::one(num_vars),
            BoundSymbol::Zero => DividedPowerPoly::zero(num_vars),
        })
    }

    /// The bound `x_k` under the conventions `x₀ = ϑ`, `x_{top+1} = 0`.
    pub fn index(k: usize, top: usize) -> Self {
        match k {
            0 => BoundSymbol::Theta,
            k if k > top => BoundSymbol::Zero,
            j => BoundSymbol::Var { j },
        }
    }
}

impl fmt::Display for BoundSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundSymbol::Theta => f.write_str("theta"),
            BoundSymbol::Var { j } => write!(f, "x{j}"),
            BoundSymbol::Zero => f.write_str("0"),
        }
    }
}

impl FromStr for BoundSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "theta" | "t" | "ϑ" | "x0" => Ok(BoundSymbol::Theta),
            "0" => Ok(BoundSymbol::Zero),
            v if v.starts_with('x') => v[1..]
                .parse()
                .map(|j| BoundSymbol::Var { j })
                .map_err(|_| Error::Parse(format!("bad bound {s:?}"))),
            _ => Err(Error::Parse(format!("bad bound {s:?}"))),
        }
    }
}

/// One step `∫_lo^hi ⋯ dx_var` of an iterated integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralStep {
    pub var: usize,
    pub lo: BoundSymbol,
    pub hi: BoundSymbol,
}

/// Steps applied left to right: the first step is the innermost integral.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub steps: Vec<IntegralStep>,
}

/// `∫_lo^hi f dx_i`: every `x_i^[N]` becomes `hi^[N+1] - lo^[N+1]`.
pub fn definite_int(f: &DividedPowerPoly, i: usize, lo: BoundSymbol, hi: BoundSymbol) -> Result<DividedPowerPoly> {
    let n = f.num_vars();
    if i == 0 {
        return Err(Error::ThetaVariable("integrated over"));
    }
    if i > n {
        return Err(Error::VariableOutOfRange { index: i, num_vars: n });
    }
    for b in [lo, hi] {
        if b == (BoundSymbol::Var { j: i }) {
            return Err(Error::InvalidArgument(format!("bound x{i} equals the integration variable")));
        }
        b.divided_power(n, 0)?;
    }
    let mut out = DividedPowerPoly::zero(n);
    let mut cache: HashMap<u32, DividedPowerPoly> = HashMap::new();
    for (e, c) in f.terms() {
        let k = e[i] + 1;
        let diff = match cache.get(&k) {
            Some(d) => d.clone(),
            None => {
                let d = &hi.divided_power(n, k)? - &lo.divided_power(n, k)?;
                cache.insert(k, d.clone());
                d
            }
        };
        let mut rest = e.clone();
        rest[i] = 0;
        let mono = DividedPowerPoly::monomial(n, rest, c.clone());
        out = &out + &(&mono * &diff);
    }
    Ok(out)
}

pub fn iterated_int(f: &DividedPowerPoly, spec: &IntegralSpec) -> Result<DividedPowerPoly> {
    spec.steps.iter().try_fold(f.clone(), |acc, s| definite_int(&acc, s.var, s.lo, s.hi))
}

/// The integration spec of `∫_{Δʳ⋊Γ}`: `x_{f(1)}` first, bounded below by
/// `x_{f(k)+1}` and above by `x_{u(k)}`.
pub fn chain_spec(chain: &MaximalChain) -> IntegralSpec {
    let top = chain.base_dim() + chain.fiber_dim();
    let sec = chain.sections();
    IntegralSpec {
        steps: (1..=chain.fiber_dim())
            .map(|k| {
                let v = sec.fiber.apply(k);
                IntegralStep {
                    var: v,
                    lo: BoundSymbol::index(v + 1, top),
                    hi: BoundSymbol::index(sec.upper[k - 1], top),
                }
            })
            .collect(),
    }
}

/// `∫_{Δʳ⋊Γ} ω` for `ω` on `Δ^{n+r}`, a form on `Δⁿ`.
pub fn chain_int(omega: &SimplexForm, chain: &MaximalChain) -> Result<SimplexForm> {
    let split = omega.chain_decompose(chain)?;
    let spec = chain_spec(chain);
    let b = chain.sections().base;
    let mut out = SimplexForm::zero(chain.base_dim());
    for ((_, base), coeff) in split.pairs.iter().zip(&split.top_fiber_coeffs) {
        if coeff.is_zero() {
            continue;
        }
        let integrated = iterated_int(coeff, &spec)?.pullback(&b)?;
        out = out.add(&base.mul_poly(&integrated));
    }
    Ok(out)
}

/// A form on the prism `Δⁿ × Δʳ`, given by its value on every simplex
/// `(α, τ) : [m] -> [n] × [r]` as a form on `Δᵐ`.
pub trait PrismForm {
    fn base_dim(&self) -> usize;
    fn fiber_dim(&self) -> usize;
    fn value(&self, base: &OrdinalMap, fiber: &OrdinalMap) -> Result<SimplexForm>;
}

impl<P: PrismForm + ?Sized> PrismForm for &P {
    fn base_dim(&self) -> usize {
        (**self).base_dim()
    }
    fn fiber_dim(&self) -> usize {
        (**self).fiber_dim()
    }
    fn value(&self, base: &OrdinalMap, fiber: &OrdinalMap) -> Result<SimplexForm> {
        (**self).value(base, fiber)
    }
}

/// `(β × γ)* P` for `β : [k] -> [n]` and `γ : [s] -> [r]`.
pub struct ReindexedPrism<P> {
    pub inner: P,
    pub base_map: OrdinalMap,
    pub fiber_map: OrdinalMap,
}

impl<P: PrismForm> ReindexedPrism<P> {
    pub fn new(inner: P, base_map: OrdinalMap, fiber_map: OrdinalMap) -> Result<Self> {
        if base_map.target_dim() != inner.base_dim() {
            return Err(Error::DimensionMismatch { expected: inner.base_dim(), found: base_map.target_dim() });
        }
        if fiber_map.target_dim() != inner.fiber_dim() {
            return Err(Error::DimensionMismatch { expected: inner.fiber_dim(), found: fiber_map.target_dim() });
        }
        Ok(ReindexedPrism { inner, base_map, fiber_map })
    }

    pub fn along_base(inner: P, base_map: OrdinalMap) -> Result<Self> {
        let r = inner.fiber_dim();
        Self::new(inner, base_map, OrdinalMap::identity(r))
    }
}

impl<P: PrismForm> PrismForm for ReindexedPrism<P> {
    fn base_dim(&self) -> usize {
        self.base_map.source_dim()
    }
    fn fiber_dim(&self) -> usize {
        self.fiber_map.source_dim()
    }
    fn value(&self, base: &OrdinalMap, fiber: &OrdinalMap) -> Result<SimplexForm> {
        self.inner.value(&self.base_map.compose(base)?, &self.fiber_map.compose(fiber)?)
    }
}

/// A prism form given by one form on `Δ^{n+r}` per maximal chain; values on
/// other simplices are obtained by factoring through a chain.
#[derive(Clone, Debug)]
pub struct ChainPrism {
    n: usize,
    r: usize,
    values: HashMap<MaximalChain, SimplexForm>,
}

impl ChainPrism {
    pub fn new(n: usize, r: usize, values: HashMap<MaximalChain, SimplexForm>) -> Result<Self> {
        for c in MaximalChain::enumerate(n, r) {
            match values.get(&c) {
                Some(v) if v.dim() == n + r => {}
                Some(v) => return Err(Error::DimensionMismatch { expected: n + r, found: v.dim() }),
                None => return Err(Error::InvalidArgument(format!("missing value for chain {}", c.step_string()))),
            }
        }
        let p = ChainPrism { n, r, values };
        p.check_compatible()?;
        Ok(p)
    }

    /// Samples a prism form from a closure on top simplices.
    pub fn from_fn(n: usize, r: usize, mut f: impl FnMut(&MaximalChain) -> SimplexForm) -> Result<Self> {
        let values = MaximalChain::enumerate(n, r).into_iter().map(|c| (c.clone(), f(&c))).collect();
        Self::new(n, r, values)
    }

    /// Restrictions of adjacent top simplices must agree on shared faces.
    fn check_compatible(&self) -> Result<()> {
        let chains = MaximalChain::enumerate(self.n, self.r);
        let mut seen: HashMap<(OrdinalMap, OrdinalMap), SimplexForm> = HashMap::new();
        for c in &chains {
            let (gb, gf) = c.projections();
            let v = &self.values[c];
            for i in 0..=self.n + self.r {
                let d = OrdinalMap::coface(self.n + self.r, i);
                let key = (gb.compose(&d)?, gf.compose(&d)?);
                let face = v.pullback(&d)?;
                if let Some(prev) = seen.get(&key) {
                    if *prev != face {
                        return Err(Error::IncompatibleForm(format!("chains disagree on face {} {}", key.0, key.1)));
                    }
                } else {
                    seen.insert(key, face);
                }
            }
        }
        Ok(())
    }
}

impl PrismForm for ChainPrism {
    fn base_dim(&self) -> usize {
        self.n
    }
    fn fiber_dim(&self) -> usize {
        self.r
    }
    fn value(&self, base: &OrdinalMap, fiber: &OrdinalMap) -> Result<SimplexForm> {
        // The joint map [m] -> [n]x[r] factors through a chain containing its image.
        let m = base.source_dim();
        let mut steps = Vec::new();
        let (mut b, mut f) = (0, 0);
        let mut through = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let (tb, tf) = (base.apply(j), fiber.apply(j));
            while f < tf {
                steps.push('F');
                f += 1;
            }
            while b < tb {
                steps.push('S');
                b += 1;
            }
            through.push(steps.len());
        }
        steps.extend(std::iter::repeat_n('F', self.r - f));
        steps.extend(std::iter::repeat_n('S', self.n - b));
        let chain = MaximalChain::parse(self.n, self.r, &steps.iter().collect::<String>())?;
        let mu = OrdinalMap::new(self.n + self.r, through)?;
        self.values[&chain].pullback(&mu)
    }
}

/// Memoizes prism values; fiber integration queries each top simplex more than once.
struct Cached<'a, P: ?Sized> {
    inner: &'a P,
    cache: RefCell<HashMap<(OrdinalMap, OrdinalMap), SimplexForm>>,
}

impl<P: PrismForm + ?Sized> Cached<'_, P> {
    fn get(&self, base: &OrdinalMap, fiber: &OrdinalMap) -> Result<SimplexForm> {
        let key = (base.clone(), fiber.clone());
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = self.inner.value(base, fiber)?;
        self.cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

/// The Eilenberg–Zilber strip of a prism form: `P = (σ × id)* P̃` with
/// `P̃ = (ι × id)* P` nondegenerate. Returns `(σ : [n] ↠ [k], ι : [k] ↪ [n])`.
pub fn ez_strip<P: PrismForm + ?Sized>(prism: &P) -> Result<(OrdinalMap, OrdinalMap)> {
    let cached = Cached { inner: prism, cache: RefCell::new(HashMap::new()) };
    ez_strip_cached(&cached)
}

#[allow(clippy::mut_range_bound)] // the scan restarts after each strip
fn ez_strip_cached<P: PrismForm + ?Sized>(prism: &Cached<'_, P>) -> Result<(OrdinalMap, OrdinalMap)> {
    let n = prism.inner.base_dim();
    let r = prism.inner.fiber_dim();
    let mut map = OrdinalMap::identity(n);
    let mut sigma = OrdinalMap::identity(n);
    let mut cur = n;
    'outer: loop {
        let chains = MaximalChain::enumerate(cur, r);
        for i in 0..cur {
            let collapse = OrdinalMap::coface(cur, i).compose(&OrdinalMap::codegeneracy(cur - 1, i))?;
            let mut degenerate = true;
            for c in &chains {
                let (gb, gf) = c.projections();
                let here = prism.get(&map.compose(&gb)?, &gf)?;
                let there = prism.get(&map.compose(&collapse.compose(&gb)?)?, &gf)?;
                if here != there {
                    degenerate = false;
                    break;
                }
            }
            if degenerate {
                map = map.compose(&OrdinalMap::coface(cur, i))?;
                sigma = OrdinalMap::codegeneracy(cur - 1, i).compose(&sigma)?;
                cur -= 1;
                continue 'outer;
            }
        }
        return Ok((sigma, map));
    }
}

/// `⨍ P`: Eilenberg–Zilber strip, then `σ*(Σ_Γ ∫_{Δʳ⋊Γ} P̃(Γ))`.
pub fn fiber_int_simplex<P: PrismForm + ?Sized>(prism: &P) -> Result<SimplexForm> {
    let cached = Cached { inner: prism, cache: RefCell::new(HashMap::new()) };
    let (sigma, iota) = ez_strip_cached(&cached)?;
    let k = iota.source_dim();
    let r = prism.fiber_dim();
    let mut out = SimplexForm::zero(k);
    for c in MaximalChain::enumerate(k, r) {
        let (gb, gf) = c.projections();
        let v = cached.get(&iota.compose(&gb)?, &gf)?;
        out = out.add(&chain_int(&v, &c)?);
    }
    out.pullback(&sigma)
}

/// `Σ_Γ ∫_{Δʳ⋊Γ} P(Γ)` over all chains of `[n] × [r]`, without stripping.
pub fn fiber_int_direct<P: PrismForm + ?Sized>(prism: &P) -> Result<SimplexForm> {
    let (n, r) = (prism.base_dim(), prism.fiber_dim());
    let mut out = SimplexForm::zero(n);
    for c in MaximalChain::enumerate(n, r) {
        let (gb, gf) = c.projections();
        out = out.add(&chain_int(&prism.value(&gb, &gf)?, &c)?);
    }
    Ok(out)
}

/// `∮ P = Σᵢ (-1)ⁱ ⨍ (id × δᵢ)* P`.
pub fn boundary_int_simplex<P: PrismForm + ?Sized>(prism: &P) -> Result<SimplexForm> {
    let (n, r) = (prism.base_dim(), prism.fiber_dim());
    if r == 0 {
        return Err(Error::InvalidArgument("boundary integration needs fiber dimension ≥ 1".into()));
    }
    let mut out = SimplexForm::zero(n);
    for i in 0..=r {
        let face = ReindexedPrism::new(prism, OrdinalMap::identity(n), OrdinalMap::coface(r, i))?;
        let v = fiber_int_simplex(&face)?;
        out = if i % 2 == 0 { out.add(&v) } else { out.sub(&v) };
    }
    Ok(out)
}

/// The exterior derivative of a prism form, simplexwise.
pub struct PrismD<P>(pub P);

impl<P: PrismForm> PrismForm for PrismD<P> {
    fn base_dim(&self) -> usize {
        self.0.base_dim()
    }
    fn fiber_dim(&self) -> usize {
        self.0.fiber_dim()
    }
    fn value(&self, base: &OrdinalMap, fiber: &OrdinalMap) -> Result<SimplexForm> {
        Ok(self.0.value(base, fiber)?.d())
    }
}

/// `⨍ dP − ∮ P − (−1)ʳ d ⨍ P` over a single base simplex.
pub fn stokes_residual_simplex<P: PrismForm>(prism: &P) -> Result<SimplexForm> {
    let r = prism.fiber_dim();
    let lhs = fiber_int_simplex(&PrismD(prism))?;
    let bdry = boundary_int_simplex(prism)?;
    let inner = fiber_int_simplex(prism)?.d();
    let inner = if r.is_multiple_of(2) { inner } else { inner.neg() };
    Ok(lhs.sub(&bdry).sub(&inner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{factorial, RationalPoly};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn p(s: &str, n: usize) -> DividedPowerPoly {
        DividedPowerPoly::parse(s, Some(n)).unwrap()
    }

    fn form(dim: usize, terms: &[(&[usize], &str)]) -> SimplexForm {
        SimplexForm::from_terms(dim, terms.iter().map(|(d, q)| (d.to_vec(), p(q, dim)))).unwrap()
    }

    fn chain(n: usize, r: usize, s: &str) -> MaximalChain {
        MaximalChain::parse(n, r, s).unwrap()
    }

    const T: BoundSymbol = BoundSymbol::Theta;
    const Z: BoundSymbol = BoundSymbol::Zero;

    #[test]
    fn definite_examples() {
        for n in 0..5 {
            let f = DividedPowerPoly::var_power(1, 1, n);
            assert_eq!(definite_int(&f, 1, Z, T).unwrap(), DividedPowerPoly::theta_power(1, n + 1));
        }
        let x1 = BoundSymbol::Var { j: 1 };
        assert!(definite_int(&p("x2^[3]*theta + x1", 2), 2, x1, x1).unwrap().is_zero());
        assert!(definite_int(&p("x1", 1), 0, Z, T).is_err());
        assert!(definite_int(&p("x1", 1), 1, Z, x1).is_err());
        assert!(definite_int(&p("x1", 1), 1, Z, BoundSymbol::Var { j: 4 }).is_err());
    }

    #[test]
    fn definite_collides_with_bound() {
        // ∫_0^{x1} x1 x2 dx2 = x1 · x2^[2]|_{x2=x1} = x1 · x1^[2] = 3 x1^[3]
        let x1 = BoundSymbol::Var { j: 1 };
        assert_eq!(definite_int(&p("x1*x2", 2), 2, Z, x1).unwrap(), p("3*x1^[3]", 2));
    }

    #[test]
    fn iterated_examples() {
        let x = |j| BoundSymbol::Var { j };
        let spec2 = IntegralSpec {
            steps: vec![IntegralStep { var: 2, lo: Z, hi: x(1) }, IntegralStep { var: 1, lo: Z, hi: T }],
        };
        assert_eq!(iterated_int(&DividedPowerPoly::one(2), &spec2).unwrap(), p("theta^[2]", 2));
        let spec3 = IntegralSpec {
            steps: vec![
                IntegralStep { var: 3, lo: Z, hi: x(2) },
                IntegralStep { var: 2, lo: Z, hi: x(1) },
                IntegralStep { var: 1, lo: Z, hi: T },
            ],
        };
        assert_eq!(iterated_int(&DividedPowerPoly::one(3), &spec3).unwrap(), p("theta^[3]", 3));
        let f = p("x1 + 5*theta", 1);
        assert_eq!(iterated_int(&f, &IntegralSpec::default()).unwrap(), f);
    }

    #[test]
    fn chain_int_examples() {
        let c = chain(0, 1, "F");
        assert_eq!(chain_int(&form(1, &[(&[1], "1")]), &c).unwrap(), form(0, &[(&[], "theta")]));
        assert_eq!(chain_int(&form(1, &[(&[1], "x1")]), &c).unwrap(), form(0, &[(&[], "theta^[2]")]));
        assert!(chain_int(&form(1, &[(&[], "x1^[3]")]), &c).unwrap().is_zero());
        // r = 0: the chain integral is the identity
        let c = chain(2, 0, "SS");
        let w = form(2, &[(&[1], "x1*x2"), (&[], "theta")]);
        assert_eq!(chain_int(&w, &c).unwrap(), w);
    }

    #[test]
    fn chain_spec_bounds() {
        let c = chain(1, 2, "FSF");
        let s = chain_spec(&c);
        // f = (0,1,3), u = (0,2); x1 in [x2, ϑ], x3 in [0, x2]
        assert_eq!(s.steps[0], IntegralStep { var: 1, lo: BoundSymbol::Var { j: 2 }, hi: T });
        assert_eq!(s.steps[1], IntegralStep { var: 3, lo: Z, hi: BoundSymbol::Var { j: 2 } });
    }

    /// `∫ Π λ_j^{a_j}` over the standard r-simplex is `Π a_j! / (Σ a_j + r)!`.
    #[test]
    fn chain_int_matches_dirichlet() {
        for r in 1..=3usize {
            let lam = |k: usize| -> DividedPowerPoly {
                let hi = DividedPowerPoly::var(r, k.max(1));
                match k {
                    0 => &DividedPowerPoly::theta_power(r, 1) - &DividedPowerPoly::var(r, 1),
                    k if k == r => hi,
                    k => &hi - &DividedPowerPoly::var(r, k + 1),
                }
            };
            let mut exps = vec![0u32; r + 1];
            loop {
                let mut integrand = DividedPowerPoly::one(r);
                for (k, &a) in exps.iter().enumerate() {
                    for _ in 0..a {
                        integrand = &integrand * &lam(k);
                    }
                }
                let top = (1..=r).collect::<Vec<_>>();
                let w = SimplexForm::from_terms(r, [(top, integrand)]).unwrap();
                let got = chain_int(&w, &MaximalChain::enumerate(0, r)[0]).unwrap();
                let total: u32 = exps.iter().sum::<u32>() + r as u32;
                let num = exps.iter().fold(BigInt::from(1), |acc, &a| acc * factorial(a));
                let expected = BigRational::new(num, factorial(total));
                assert_eq!(got.realize().terms().get(&0).cloned().unwrap_or_else(|| RationalPoly::zero(0)),
                    RationalPoly::constant(0, expected), "r={r} exps={exps:?}");
                // the result is homogeneous of degree `total` in ϑ
                assert!(got.coefficient(0).terms().keys().all(|e| e[0] == total));
                let mut i = 0;
                while i <= r && exps[i] == 2 {
                    exps[i] = 0;
                    i += 1;
                }
                if i > r {
                    break;
                }
                exps[i] += 1;
            }
        }
    }

    #[test]
    fn chain_prism_lookup_and_validation() {
        // the prism form pulled back from the fiber coordinate x1 on Δ¹
        let prism = ChainPrism::from_fn(1, 1, |c| {
            let (_, gf) = c.projections();
            form(1, &[(&[], "x1")]).pullback(&gf).unwrap()
        })
        .unwrap();
        let v = prism.value(&OrdinalMap::new(1, vec![0, 1]).unwrap(), &OrdinalMap::new(1, vec![1, 1]).unwrap()).unwrap();
        assert_eq!(v, form(1, &[(&[], "theta")]));
        let bad = ChainPrism::from_fn(1, 1, |c| {
            if c.step_string() == "FS" { form(2, &[(&[], "x1")]) } else { form(2, &[(&[], "theta")]) }
        });
        assert!(matches!(bad, Err(Error::IncompatibleForm(_))));
    }

    #[test]
    fn fiber_int_examples() {
        // n = 0, r = 1, dx1 on Δ¹
        let prism = ChainPrism::from_fn(0, 1, |_| form(1, &[(&[1], "1")])).unwrap();
        assert_eq!(fiber_int_simplex(&prism).unwrap(), form(0, &[(&[], "theta")]));
        // r = 0 is the identity
        let w = form(2, &[(&[1, 2], "x1"), (&[], "x2^[2]")]);
        let prism = ChainPrism::from_fn(2, 0, |_| w.clone()).unwrap();
        assert_eq!(fiber_int_simplex(&prism).unwrap(), w);
        // Δ¹ base, fiber coordinate's dx: the constant ϑ
        let prism = ChainPrism::from_fn(1, 1, |c| {
            let (_, gf) = c.projections();
            form(1, &[(&[1], "1")]).pullback(&gf).unwrap()
        })
        .unwrap();
        assert_eq!(fiber_int_simplex(&prism).unwrap(), form(1, &[(&[], "theta")]));
        assert_eq!(fiber_int_direct(&prism).unwrap(), form(1, &[(&[], "theta")]));
        // a form pulled back from the base integrates to zero
        let prism = ChainPrism::from_fn(1, 1, |c| {
            let (gb, _) = c.projections();
            form(1, &[(&[1], "x1^[2]")]).pullback(&gb).unwrap()
        })
        .unwrap();
        assert!(fiber_int_simplex(&prism).unwrap().is_zero());
    }

    #[test]
    fn ez_strip_degenerate_prism() {
        // y on Δ¹ × Δ¹ pulled back along σ₀ × id to Δ² × Δ¹
        let y = ChainPrism::from_fn(1, 1, |c| {
            let (gb, gf) = c.projections();
            form(1, &[(&[], "x1")]).pullback(&gb).unwrap().wedge(&form(1, &[(&[1], "1")]).pullback(&gf).unwrap())
        })
        .unwrap();
        let s0 = OrdinalMap::codegeneracy(1, 0);
        let degenerate = ReindexedPrism::along_base(&y, s0.clone()).unwrap();
        let (sigma, iota) = ez_strip(&degenerate).unwrap();
        assert_eq!(sigma, s0);
        assert_eq!(iota.source_dim(), 1);
        let expected = fiber_int_simplex(&y).unwrap().pullback(&s0).unwrap();
        assert_eq!(fiber_int_simplex(&degenerate).unwrap(), expected);
        assert_eq!(fiber_int_direct(&degenerate).unwrap(), expected);
    }

    #[test]
    fn boundary_and_stokes_examples() {
        let prism = ChainPrism::from_fn(0, 1, |_| form(1, &[(&[], "x1")])).unwrap();
        assert_eq!(boundary_int_simplex(&prism).unwrap(), form(0, &[(&[], "theta")]));
        assert_eq!(fiber_int_simplex(&PrismD(&prism)).unwrap(), form(0, &[(&[], "theta")]));
        assert!(stokes_residual_simplex(&prism).unwrap().is_zero());
        let zero = ChainPrism::from_fn(1, 2, |_| SimplexForm::zero(3)).unwrap();
        assert!(stokes_residual_simplex(&zero).unwrap().is_zero());
        let flat = ChainPrism::from_fn(1, 0, |_| SimplexForm::zero(1)).unwrap();
        assert!(boundary_int_simplex(&flat).is_err());
    }

    #[test]
    fn bound_symbol_text() {
        for s in ["theta", "0", "x3"] {
            assert_eq!(s.parse::<BoundSymbol>().unwrap().to_string(), s);
        }
        assert!("y1".parse::<BoundSymbol>().is_err());
        let j = serde_json::to_string(&BoundSymbol::Var { j: 2 }).unwrap();
        assert_eq!(j, r#"{"tag":"Var","j":2}"#);
    }
}
