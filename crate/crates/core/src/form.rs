//! The divided-power de Rham algebra `Ω•(Δⁿ)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dp::{variable_targets, DividedPowerPoly, RationalPoly};
use crate::error::{Error, Result};
use crate::ordinal::{MaximalChain, OrdinalMap};

/// Bitmask of differentials: bit `i` set means `dx_i` occurs (`1 ≤ i ≤ n`).
pub type DxMask = u32;

pub const MAX_FORM_DIM: usize = 31;

pub fn mask_from_indices(indices: &[usize]) -> DxMask {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

pub fn mask_indices(mask: DxMask) -> Vec<usize> {
    (1..=MAX_FORM_DIM).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sign of `dx_S ∧ dx_T` relative to `dx_{S ∪ T}`; `None` when they overlap.
pub fn wedge_sign(s: DxMask, t: DxMask) -> Option<i32> {
    if s & t != 0 {
        return None;
    }
    let mut inversions = 0;
    for i in mask_indices(t) {
        inversions += (s >> (i + 1)).count_ones();
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// A differential form on `Δⁿ` with coefficients in `ℤ⟨ϑ, x₁, …, xₙ⟩`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SimplexForm {
    dim: usize,
    terms: BTreeMap<DxMask, DividedPowerPoly>,
}

impl SimplexForm {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_FORM_DIM, "form dimension too large");
        SimplexForm { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::from_poly(DividedPowerPoly::one(dim))
    }

    pub fn from_poly(p: DividedPowerPoly) -> Self {
        Self::term(0, p)
    }

    /// `p · dx_S` for the index set encoded by `mask`.
    pub fn term(mask: DxMask, p: DividedPowerPoly) -> Self {
        let mut f = Self::zero(p.num_vars());
        assert!(mask >> (f.dim + 1) == 0 && mask & 1 == 0, "dx index out of range");
        f.add_term(mask, p);
        f
    }

    pub fn dx(dim: usize, i: usize) -> Self {
        assert!((1..=dim).contains(&i));
        Self::term(1 << i, DividedPowerPoly::one(dim))
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<usize>, DividedPowerPoly)>>(dim: usize, terms: I) -> Result<Self> {
        let mut f = Self::zero(dim);
        for (idx, p) in terms {
            if p.num_vars() != dim {
                return Err(Error::VariableCount(dim, p.num_vars()));
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!("dx indices {idx:?} not strictly ascending")));
            }
            if idx.iter().any(|&i| i == 0 || i > dim) {
                return Err(Error::InvalidArgument(format!("dx indices {idx:?} out of range 1..={dim}")));
            }
            f.add_term(mask_from_indices(&idx), p);
        }
        Ok(f)
    }

    pub(crate) fn add_term(&mut self, mask: DxMask, p: DividedPowerPoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(mask) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &p;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<DxMask, DividedPowerPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree of all terms; `None` for zero or mixed forms.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.count_ones() as usize);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn homogeneous_part(&self, k: usize) -> Self {
        SimplexForm {
            dim: self.dim,
            terms: self.terms.iter().filter(|(m, _)| m.count_ones() as usize == k).map(|(m, p)| (*m, p.clone())).collect(),
        }
    }

    /// Coefficient of `dx_S` (zero if absent).
    pub fn coefficient(&self, mask: DxMask) -> DividedPowerPoly {
        self.terms.get(&mask).cloned().unwrap_or_else(|| DividedPowerPoly::zero(self.dim))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(*m, p.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("form dimension mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigInt::one())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        SimplexForm { dim: self.dim, terms: self.terms.iter().map(|(m, p)| (*m, p.scale(c))).collect() }
    }

    pub fn scale_sign(&self, sign: i32) -> Self {
        if sign >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn mul_poly(&self, q: &DividedPowerPoly) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, p) in &self.terms {
            out.add_term(*m, p * q);
        }
        out
    }

    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (s, p) in &self.terms {
            for (t, q) in &other.terms {
                if let Some(sign) = wedge_sign(*s, *t) {
                    let prod = p * q;
                    out.add_term(s | t, if sign < 0 { -&prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        self.try_wedge(other).expect("form dimension mismatch")
    }

    /// Exterior derivative, `d(f dx_S) = Σᵢ ∂ᵢf dxᵢ ∧ dx_S`.
    pub fn d(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (s, p) in &self.terms {
            for i in 1..=self.dim {
                if s & (1 << i) != 0 || !p.contains_var(i) {
                    continue;
                }
                let dp = p.partial(i).expect("index in range");
                let before = (s & ((1 << i) - 1)).count_ones();
                out.add_term(s | (1 << i), if before % 2 == 0 { dp } else { -&dp });
            }
        }
        out
    }

    /// `α*ω` for `α : [m] -> [n]`.
    pub fn pullback(&self, alpha: &OrdinalMap) -> Result<Self> {
        if alpha.target_dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: alpha.target_dim() });
        }
        let targets = variable_targets(alpha);
        let m = alpha.source_dim();
        let mut out = Self::zero(m);
        'terms: for (s, p) in &self.terms {
            let mut mask: DxMask = 0;
            for i in mask_indices(*s) {
                match targets[i] {
                    Some(j) if j >= 1 && mask & (1 << j) == 0 => mask |= 1 << j,
                    _ => continue 'terms,
                }
            }
            let q = p.pullback(alpha)?;
            out.add_term(mask, q);
        }
        Ok(out)
    }

    /// Coefficientwise embedding into `ℚ[x₀, …, xₙ]`.
    pub fn embed_rational(&self) -> RationalForm {
        RationalForm { dim: self.dim, terms: self.terms.iter().map(|(m, p)| (*m, p.embed_rational())).collect() }
    }

    /// Coefficientwise field realization (`ϑ ↦ 1`).
    pub fn realize(&self) -> RationalForm {
        let mut out = RationalForm::zero(self.dim);
        for (m, p) in &self.terms {
            out.add_term(*m, p.realize());
        }
        out
    }

    /// Splits each monomial into a fiber part on `Δ^{n+r}` and a base part on
    /// `Δⁿ` along the chain `Γ`, with `dx_S = ± dx_{S_f} ∧ dx_{S_b}`.
    pub fn chain_decompose(&self, chain: &MaximalChain) -> Result<ChainSplit> {
        let (n, r) = (chain.base_dim(), chain.fiber_dim());
        if self.dim != n + r {
            return Err(Error::DimensionMismatch { expected: n + r, found: self.dim });
        }
        let sec = chain.sections();
        let base_pos: Vec<usize> = (1..=n).map(|i| sec.base.apply(i)).collect();
        let base_mask = mask_from_indices(&base_pos);
        let mut groups: BTreeMap<(DxMask, Vec<u32>), SimplexForm> = BTreeMap::new();
        for (s, p) in &self.terms {
            let sb = s & base_mask;
            let sf = s & !base_mask;
            let mut inversions = 0;
            for t in mask_indices(sf) {
                inversions += (sb & ((1 << t) - 1)).count_ones();
            }
            let mut bmask: DxMask = 0;
            for (k, &pos) in base_pos.iter().enumerate() {
                if sb & (1 << pos) != 0 {
                    bmask |= 1 << (k + 1);
                }
            }
            for (e, c) in p.terms() {
                let mut be = vec![0u32; n + 1];
                let mut fe = e.clone();
                for (k, &pos) in base_pos.iter().enumerate() {
                    be[k + 1] = e[pos];
                    fe[pos] = 0;
                }
                let c = if inversions % 2 == 0 { c.clone() } else { -c };
                let fiber = SimplexForm::term(sf, DividedPowerPoly::monomial(n + r, fe, c));
                groups
                    .entry((bmask, be))
                    .and_modify(|f| *f = f.add(&fiber))
                    .or_insert(fiber);
            }
        }
        let top_mask = mask_from_indices(&(1..=r).map(|k| sec.fiber.apply(k)).collect::<Vec<_>>());
        let mut pairs = Vec::new();
        let mut top = Vec::new();
        for ((bmask, be), fiber) in groups {
            if fiber.is_zero() {
                continue;
            }
            let base = SimplexForm::term(bmask, DividedPowerPoly::monomial(n, be, BigInt::one()));
            top.push(fiber.coefficient(top_mask));
            pairs.push((fiber, base));
        }
        Ok(ChainSplit { pairs, top_fiber_coeffs: top, top_mask })
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, p)| {
                let dxs: Vec<String> = mask_indices(*m).iter().map(|i| format!("dx{i}")).collect();
                match (dxs.is_empty(), p.len()) {
                    (true, _) => p.to_text(),
                    (false, _) if p.to_text() == "1" => dxs.join("∧"),
                    _ => format!("({p})·{}", dxs.join("∧")),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for SimplexForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct FormTermRepr {
    dxs: Vec<usize>,
    poly: DividedPowerPoly,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    dim: usize,
    terms: Vec<FormTermRepr>,
}

impl Serialize for SimplexForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormRepr {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, p)| FormTermRepr { dxs: mask_indices(*m), poly: p.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimplexForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = FormRepr::deserialize(d)?;
        if r.dim > MAX_FORM_DIM {
            return Err(D::Error::custom("form dimension too large"));
        }
        SimplexForm::from_terms(r.dim, r.terms.into_iter().map(|t| (t.dxs, t.poly))).map_err(D::Error::custom)
    }
}

/// Output of [`SimplexForm::chain_decompose`]: `ω = Σ fiberᵢ ∧ Γ_b*(baseᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSplit {
    pub pairs: Vec<(SimplexForm, SimplexForm)>,
    /// Coefficient of `dx_{f(1)} ∧ ⋯ ∧ dx_{f(r)}` in each fiber part.
    pub top_fiber_coeffs: Vec<DividedPowerPoly>,
    pub top_mask: DxMask,
}

impl ChainSplit {
    pub fn reassemble(&self, chain: &MaximalChain) -> Result<SimplexForm> {
        let (gb, _) = chain.projections();
        let mut out = SimplexForm::zero(chain.base_dim() + chain.fiber_dim());
        for (fiber, base) in &self.pairs {
            out = out.add(&fiber.wedge(&base.pullback(&gb)?));
        }
        Ok(out)
    }
}

/// A form with coefficients in `ℚ[x₀, …, xₙ]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalForm {
    dim: usize,
    terms: BTreeMap<DxMask, RationalPoly>,
}

impl RationalForm {
    pub fn zero(dim: usize) -> Self {
        RationalForm { dim, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, mask: DxMask, p: RationalPoly) {
        if p.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&mask) {
            Some(q) => q.add(&p),
            None => p,
        };
        if !sum.is_zero() {
            self.terms.insert(mask, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<DxMask, RationalPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(*m, p.clone());
        }
        out
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, p)| {
                let dxs: Vec<String> = mask_indices(*m).iter().map(|i| format!("dx{i}")).collect();
                if dxs.is_empty() {
                    p.to_text()
                } else {
                    format!("({p})·{}", dxs.join("∧"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl Serialize for RationalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct T<'a> {
            dxs: Vec<usize>,
            poly: &'a RationalPoly,
        }
        #[derive(Serialize)]
        struct R<'a> {
            dim: usize,
            terms: Vec<T<'a>>,
        }
        R { dim: self.dim, terms: self.terms.iter().map(|(m, p)| T { dxs: mask_indices(*m), poly: p }).collect() }
            .serialize(s)
    }
}
