//! Differential forms on finite simplicial sets, path simplices, and the
//! simplicial iterated integral.

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::dp::{DividedPowerPoly, Exps};
use crate::error::{Error, Result};
use crate::form::{DxMask, SimplexForm};
use crate::integrate::{self, PrismForm};
use crate::ordinal::OrdinalMap;
use crate::sset::{space_from_json, space_to_json, FiniteSimplicialSet, Simplex, SimplicialMap};

/// A compatible family of forms, one on `Δᵏ` for each nondegenerate
/// `k`-cell.
#[derive(Clone, Debug)]
pub struct SimplicialForm {
    space: Arc<FiniteSimplicialSet>,
    values: Vec<Vec<SimplexForm>>,
}

impl PartialEq for SimplicialForm {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && (Arc::ptr_eq(&self.space, &other.space) || self.space == other.space)
    }
}

impl Eq for SimplicialForm {}

impl Hash for SimplicialForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.space.descriptor().hash(state);
        self.values.hash(state);
    }
}

impl SimplicialForm {
    /// Checks `δᵢ*(value(σ)) = value(dᵢσ)` for every cell and face.
    pub fn new(space: Arc<FiniteSimplicialSet>, values: Vec<Vec<SimplexForm>>) -> Result<Self> {
        let f = Self::new_unchecked(space, values)?;
        f.validate()?;
        Ok(f)
    }

    /// Skips the compatibility check but still checks shapes.
    pub fn new_unchecked(space: Arc<FiniteSimplicialSet>, values: Vec<Vec<SimplexForm>>) -> Result<Self> {
        let counts = space.counts();
        if values.len() != counts.len() || values.iter().zip(&counts).any(|(v, &c)| v.len() != c) {
            return Err(Error::IncompatibleForm(format!("value table does not match the cells of {}", space.descriptor())));
        }
        for (k, level) in values.iter().enumerate() {
            for v in level {
                if v.dim() != k {
                    return Err(Error::DimensionMismatch { expected: k, found: v.dim() });
                }
            }
        }
        Ok(SimplicialForm { space, values })
    }

    pub fn from_fn(space: Arc<FiniteSimplicialSet>, mut f: impl FnMut(usize, usize) -> Result<SimplexForm>) -> Result<Self> {
        let values = (0..space.counts().len())
            .map(|k| (0..space.cells(k).len()).map(|c| f(k, c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new_unchecked(space, values)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, level) in self.space.all_cells().iter().enumerate().skip(1) {
            for (c, cell) in level.iter().enumerate() {
                for (i, face) in cell.faces.iter().enumerate() {
                    let restricted = self.values[k][c].pullback(&OrdinalMap::coface(k, i))?;
                    if restricted != self.form_at(face)? {
                        return Err(Error::IncompatibleForm(format!("face {i} of cell {}", cell.name)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero(space: Arc<FiniteSimplicialSet>) -> Self {
        Self::from_fn(space, |k, _| Ok(SimplexForm::zero(k))).expect("shape")
    }

    /// The constant form `c · 1` for a `ℤ⟨ϑ⟩` scalar `c` (a polynomial in `ϑ` on `Δ⁰`).
    pub fn constant(space: Arc<FiniteSimplicialSet>, c: &DividedPowerPoly) -> Result<Self> {
        if c.num_vars() != 0 {
            return Err(Error::InvalidArgument("constant must be a polynomial in theta alone".into()));
        }
        Self::from_fn(space, |k, _| SimplexForm::from_poly(c.clone()).pullback(&OrdinalMap::constant(k, 0, 0)))
    }

    pub fn one(space: Arc<FiniteSimplicialSet>) -> Self {
        Self::constant(space, &DividedPowerPoly::one(0)).expect("shape")
    }

    pub fn space(&self) -> &Arc<FiniteSimplicialSet> {
        &self.space
    }

    pub fn values(&self) -> &[Vec<SimplexForm>] {
        &self.values
    }

    pub fn value(&self, k: usize, c: usize) -> &SimplexForm {
        &self.values[k][c]
    }

    /// The form on a possibly degenerate simplex.
    pub fn form_at(&self, s: &Simplex) -> Result<SimplexForm> {
        self.space.check_simplex(s)?;
        let v = &self.values[s.cell_dim()][s.cell];
        if s.is_nondegenerate() {
            Ok(v.clone())
        } else {
            v.pullback(&s.degeneracy)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_zero())
    }

    /// The common degree of all nonzero cell values.
    pub fn degree(&self) -> Option<usize> {
        let mut d = None;
        for v in self.values.iter().flatten() {
            if v.is_zero() {
                continue;
            }
            let e = v.degree()?;
            match d {
                None => d = Some(e),
                Some(x) if x != e => return None,
                _ => {}
            }
        }
        d
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(self.space.descriptor().into(), other.space.descriptor().into()))
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&SimplexForm, &SimplexForm) -> SimplexForm) -> Result<Self> {
        self.check_space(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            .collect();
        Ok(SimplicialForm { space: self.space.clone(), values })
    }

    fn map(&self, f: impl Fn(&SimplexForm) -> SimplexForm) -> Self {
        SimplicialForm { space: self.space.clone(), values: self.values.iter().map(|l| l.iter().map(&f).collect()).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.wedge(b))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        self.map(|v| v.scale(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.neg())
    }

    pub fn d(&self) -> Self {
        self.map(|v| v.d())
    }

    pub fn homogeneous_part(&self, k: usize) -> Self {
        self.map(|v| v.homogeneous_part(k))
    }

    /// `f*G` for `f : Y -> X` and `G` on `X`.
    pub fn pullback(&self, f: &SimplicialMap) -> Result<Self> {
        if **f.target() != *self.space {
            return Err(Error::SpaceMismatch(f.target().descriptor().into(), self.space.descriptor().into()));
        }
        let values = f
            .images()
            .iter()
            .map(|l| l.iter().map(|s| self.form_at(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(SimplicialForm { space: f.source().clone(), values })
    }

    /// The `ℤ⟨ϑ⟩` scalar at a vertex (the degree-0 part there).
    pub fn at_vertex(&self, v: usize) -> Result<DividedPowerPoly> {
        let vals = self.values.first().ok_or(Error::NotVertex)?;
        let f = vals.get(v).ok_or(Error::NotVertex)?;
        Ok(f.coefficient(0))
    }

    /// Realized coordinates keyed by `(dim, cell, dx mask, exponents)`.
    pub fn realized_coords(&self) -> BTreeMap<(usize, usize, DxMask, Exps), BigRational> {
        let mut out = BTreeMap::new();
        for (k, level) in self.values.iter().enumerate() {
            for (c, v) in level.iter().enumerate() {
                for (m, p) in v.realize().terms() {
                    for (e, coef) in p.terms() {
                        out.insert((k, c, *m, e.clone()), coef.clone());
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut values = serde_json::Map::new();
        for (k, level) in self.values.iter().enumerate() {
            for (c, v) in level.iter().enumerate() {
                values.insert(format!("{k}:{c}"), serde_json::to_value(v).expect("serializable"));
            }
        }
        json!({ "space": space_to_json(&self.space), "values": values })
    }

    /// Parses `{"space": …, "values": {"k:i": form}}`; missing cells are zero.
    pub fn from_json(v: &Value) -> Result<Self> {
        let space = Arc::new(space_from_json(v.get("space").ok_or_else(|| Error::Parse("missing space".into()))?)?);
        Self::from_json_on(space, v)
    }

    pub fn from_json_on(space: Arc<FiniteSimplicialSet>, v: &Value) -> Result<Self> {
        let mut values: Vec<Vec<SimplexForm>> =
            (0..space.counts().len()).map(|k| vec![SimplexForm::zero(k); space.cells(k).len()]).collect();
        let obj = v
            .get("values")
            .and_then(|x| x.as_object())
            .ok_or_else(|| Error::Parse("values must be an object".into()))?;
        for (key, f) in obj {
            let (k, c) = key
                .split_once(':')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                .ok_or_else(|| Error::Parse(format!("bad cell key {key:?}")))?;
            let slot = values
                .get_mut(k)
                .and_then(|l| l.get_mut(c))
                .ok_or_else(|| Error::Parse(format!("no cell {key}")))?;
            let form: SimplexForm = serde_json::from_value(f.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            if form.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, found: form.dim() });
            }
            *slot = form;
        }
        Self::new(space, values)
    }
}

/// Checks that `space` is `X × Δʳ` and returns `(X, r)`.
fn split_product(space: &FiniteSimplicialSet) -> Result<(&Arc<FiniteSimplicialSet>, usize)> {
    let (x, fiber) = space
        .factors()
        .ok_or_else(|| Error::InvalidArgument(format!("{} is not a product X × Δʳ", space.descriptor())))?;
    let r = fiber
        .descriptor()
        .strip_prefix("simplex:")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("fiber {} is not a standard simplex", fiber.descriptor())))?;
    if space.max_dim() < x.max_dim() + r {
        return Err(Error::InvalidArgument(format!("product cutoff below {}", x.max_dim() + r)));
    }
    Ok((x, r))
}

/// A form on `X × Δʳ` restricted over one cell `x` of `X`.
pub struct FiberPrism<'a> {
    form: &'a SimplicialForm,
    base: Simplex,
    r: usize,
}

impl<'a> FiberPrism<'a> {
    pub fn new(form: &'a SimplicialForm, k: usize, c: usize) -> Result<Self> {
        let (x, r) = split_product(&form.space)?;
        if k > x.max_dim() || c >= x.cells(k).len() {
            return Err(Error::InvalidArgument(format!("no cell {k}:{c} in {}", x.descriptor())));
        }
        Ok(FiberPrism { form, base: Simplex::cell(k, c), r })
    }
}

impl PrismForm for FiberPrism<'_> {
    fn base_dim(&self) -> usize {
        self.base.dim()
    }
    fn fiber_dim(&self) -> usize {
        self.r
    }
    fn value(&self, base: &OrdinalMap, fiber: &OrdinalMap) -> Result<SimplexForm> {
        let space = &self.form.space;
        let (x, delta) = space.factors().expect("checked product");
        let xs = x.apply(&self.base, base)?;
        let ts = delta.simplex_from_vertices(fiber.images())?;
        self.form.form_at(&space.pair(&xs, &ts)?)
    }
}

fn per_base_cell(
    form: &SimplicialForm,
    f: impl Fn(&FiberPrism<'_>) -> Result<SimplexForm>,
) -> Result<SimplicialForm> {
    let (x, _) = split_product(&form.space)?;
    let x = x.clone();
    SimplicialForm::from_fn(x, |k, c| f(&FiberPrism::new(form, k, c)?))
}

/// `⨍ F` for `F` on `X × Δʳ`, a form on `X`.
pub fn fiber_int(form: &SimplicialForm) -> Result<SimplicialForm> {
    per_base_cell(form, |p| integrate::fiber_int_simplex(p))
}

/// `∮ F = Σᵢ (−1)ⁱ ⨍ (id × δᵢ)* F`.
pub fn boundary_int(form: &SimplicialForm) -> Result<SimplicialForm> {
    per_base_cell(form, |p| integrate::boundary_int_simplex(p))
}

/// `⨍ dF − ∮ F − (−1)ʳ d ⨍ F`.
pub fn stokes_residual(form: &SimplicialForm) -> Result<SimplicialForm> {
    per_base_cell(form, |p| integrate::stokes_residual_simplex(p))
}

/// An `n`-simplex of the path space `X^{Δ¹}`: a map `Δⁿ × Δ¹ -> X`.
#[derive(Clone, Debug)]
pub struct PathSimplex {
    n: usize,
    map: SimplicialMap,
}

fn nerve_vertices(x: &FiniteSimplicialSet, s: &Simplex) -> Vec<usize> {
    let v = x.vertices(s.cell_dim(), s.cell);
    s.degeneracy.images().iter().map(|&j| v[j]).collect()
}

impl PathSimplex {
    pub fn new(n: usize, map: SimplicialMap) -> Result<Self> {
        let expected = format!("product:simplex:{n}:simplex:1:{}", n + 1);
        if map.source().descriptor() != expected {
            return Err(Error::InvalidSimplicialMap(format!(
                "path source must be {expected}, found {}",
                map.source().descriptor()
            )));
        }
        Ok(PathSimplex { n, map })
    }

    /// Builds the path from its values on simplices `(α, g)` of `Δⁿ × Δ¹`.
    pub fn from_fn(
        n: usize,
        target: Arc<FiniteSimplicialSet>,
        f: impl Fn(&OrdinalMap, &OrdinalMap) -> Result<Simplex>,
    ) -> Result<Self> {
        let prism = Arc::new(FiniteSimplicialSet::preset(&format!("product:simplex:{n}:simplex:1"))?);
        let (a, b) = prism.factors().expect("product");
        let mut images = Vec::new();
        for k in 0..=prism.max_dim() {
            let mut level = Vec::new();
            for c in 0..prism.cells(k).len() {
                let (x, y) = prism.product_pair(k, c).expect("product");
                let alpha = OrdinalMap::new(n, nerve_vertices(a, x))?;
                let g = OrdinalMap::new(1, nerve_vertices(b, y))?;
                level.push(f(&alpha, &g)?);
            }
            images.push(level);
        }
        Self::new(n, SimplicialMap::new(prism, target, images)?)
    }

    /// The path `(i, e) ↦ s(h(i, e))` for a monotone `h : [n] × [1] -> [k]`
    /// and a `k`-simplex `s` of `X`.
    pub fn from_poset_map(n: usize, h: &[[usize; 2]], target: Arc<FiniteSimplicialSet>, s: &Simplex) -> Result<Self> {
        if h.len() != n + 1 {
            return Err(Error::InvalidArgument(format!("poset map needs {} rows", n + 1)));
        }
        let k = s.dim();
        for i in 0..=n {
            if h[i][0] > h[i][1] || h[i][1] > k || (i > 0 && (h[i - 1][0] > h[i][0] || h[i - 1][1] > h[i][1])) {
                return Err(Error::InvalidArgument("poset map is not monotone into [k]".into()));
            }
        }
        target.check_simplex(s)?;
        let t = target.clone();
        Self::from_fn(n, target, |alpha, g| {
            let mu: Vec<usize> = (0..=alpha.source_dim()).map(|j| h[alpha.apply(j)][g.apply(j)]).collect();
            t.apply(s, &OrdinalMap::new(k, mu)?)
        })
    }

    /// The constant path at an `n`-simplex.
    pub fn constant(target: Arc<FiniteSimplicialSet>, s: &Simplex) -> Result<Self> {
        let h: Vec<[usize; 2]> = (0..=s.dim()).map(|i| [i, i]).collect();
        Self::from_poset_map(s.dim(), &h, target, s)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> &Arc<FiniteSimplicialSet> {
        self.map.target()
    }

    pub fn map(&self) -> &SimplicialMap {
        &self.map
    }

    /// `φ(α, g)` for `α : [m] -> [n]`, `g : [m] -> [1]`.
    pub fn eval(&self, alpha: &OrdinalMap, g: &OrdinalMap) -> Result<Simplex> {
        let prism = self.map.source();
        let (a, b) = prism.factors().expect("product");
        let s = prism.pair(&a.simplex_from_vertices(alpha.images())?, &b.simplex_from_vertices(g.images())?)?;
        self.map.apply(&s)
    }

    /// `E_ε(φ)`: the restriction to `Δⁿ × {ε}`.
    pub fn endpoint(&self, eps: usize) -> Result<Simplex> {
        if eps > 1 {
            return Err(Error::InvalidArgument("endpoint must be 0 or 1".into()));
        }
        self.eval(&OrdinalMap::identity(self.n), &OrdinalMap::constant(self.n, 1, eps))
    }

    /// `φ ∘ (α × id)`.
    pub fn precompose(&self, alpha: &OrdinalMap) -> Result<PathSimplex> {
        if alpha.target_dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: alpha.target_dim() });
        }
        Self::from_fn(alpha.source_dim(), self.target().clone(), |b, g| self.eval(&alpha.compose(b)?, g))
    }

    /// Whether both ends are degenerate on the vertex `v`.
    pub fn is_loop_at(&self, v: usize) -> Result<bool> {
        let at = |e| -> Result<bool> {
            let s = self.endpoint(e)?;
            Ok(s.cell_dim() == 0 && s.cell == v)
        };
        Ok(at(0)? && at(1)?)
    }

    pub fn to_json(&self) -> Value {
        json!({ "n": self.n, "map": self.map.to_json() })
    }

    /// Accepts `{"n", "map"}` or `{"target", "simplex", "h"}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(m) = v.get("map") {
            let n = v
                .get("n")
                .and_then(|x| x.as_u64())
                .ok_or_else(|| Error::Parse("missing n".into()))? as usize;
            return Self::new(n, SimplicialMap::from_json(m)?);
        }
        let target = Arc::new(space_from_json(v.get("target").ok_or_else(|| Error::Parse("missing target".into()))?)?);
        let s: Simplex = serde_json::from_value(v.get("simplex").cloned().unwrap_or_default())
            .map_err(|e| Error::Parse(format!("simplex: {e}")))?;
        let h: Vec<[usize; 2]> = serde_json::from_value(v.get("h").cloned().unwrap_or_default())
            .map_err(|e| Error::Parse(format!("h: {e}")))?;
        if h.is_empty() {
            return Err(Error::Parse("h must be nonempty".into()));
        }
        Self::from_poset_map(h.len() - 1, &h, target, &s)
    }
}

/// `ω₁ × ⋯ × ω_r` pulled back along `φ`: a prism form on `Δⁿ × Δʳ`.
pub struct ProductForm<'a> {
    forms: &'a [SimplicialForm],
    path: &'a PathSimplex,
}

impl<'a> ProductForm<'a> {
    pub fn new(forms: &'a [SimplicialForm], path: &'a PathSimplex) -> Result<Self> {
        for f in forms {
            if **f.space() != **path.target() {
                return Err(Error::SpaceMismatch(f.space().descriptor().into(), path.target().descriptor().into()));
            }
        }
        Ok(ProductForm { forms, path })
    }
}

impl PrismForm for ProductForm<'_> {
    fn base_dim(&self) -> usize {
        self.path.dim()
    }
    fn fiber_dim(&self) -> usize {
        self.forms.len()
    }
    fn value(&self, base: &OrdinalMap, fiber: &OrdinalMap) -> Result<SimplexForm> {
        let m = base.source_dim();
        let mut out = SimplexForm::one(m);
        for (idx, w) in self.forms.iter().enumerate() {
            let i = idx + 1;
            let g = OrdinalMap::new(1, fiber.images().iter().map(|&t| usize::from(t >= i)).collect())?;
            out = out.wedge(&w.form_at(&self.path.eval(base, &g)?)?);
            if out.is_zero() {
                break;
            }
        }
        Ok(out)
    }
}

/// `(∫ω₁⋯ω_r)(φ)`, a form on `Δⁿ`.
pub fn iterated_integral_at(forms: &[SimplicialForm], path: &PathSimplex) -> Result<SimplexForm> {
    integrate::fiber_int_simplex(&ProductForm::new(forms, path)?)
}
