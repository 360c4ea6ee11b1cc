//! Seeded generators for polynomials, forms, prism forms and path simplices.
//!
//! Forms on a simplicial set are built from global pieces, so they are
//! compatible by construction. On a cell `σ` with barycentric coordinates
//! `λ₀ = ϑ − x₁`, `λₖ = xₖ − xₖ₊₁`, `λₘ = xₘ`, every cell `ρ` of `X` gives the
//! function `μ_ρ|σ = Σ Π_j λ_{ι(j)}`, summed over the injections `ι` with
//! `σ ∘ ι = ρ`. Random terms are `c · ϑ^[a] · Π μ · dμ ∧ ⋯ ∧ dμ`. Maximal cells
//! additionally carry bump terms `(Π λ) · monomial · dx_S`, which vanish on
//! every proper face.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dp::DividedPowerPoly;
use crate::error::{Error, Result};
use crate::form::{mask_from_indices, SimplexForm};
use crate::ordinal::{MaximalChain, OrdinalMap};
use crate::sform::{PathSimplex, SimplicialForm};
use crate::sset::{FiniteSimplicialSet, Simplex};

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Shape limits for generated data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    /// Bound on exponents of monomials and on the polynomial degree of multipliers.
    pub max_exp: u32,
    /// Number of random global terms per form.
    pub terms: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { max_exp: 3, terms: 3 }
    }
}

fn coef(rng: &mut impl Rng) -> BigInt {
    let c: i32 = rng.random_range(1..=9);
    BigInt::from(if rng.random_bool(0.5) { c } else { -c })
}

/// A polynomial in `ϑ, x₁..xₙ` with up to `terms` monomials, exponents `≤ max_exp`.
pub fn random_poly(n: usize, max_exp: u32, terms: usize, rng: &mut impl Rng) -> DividedPowerPoly {
    let mut p = DividedPowerPoly::zero(n);
    let count = rng.random_range(1..=terms.max(1));
    for _ in 0..count {
        let exps = (0..=n).map(|_| rng.random_range(0..=max_exp)).collect();
        p = &p + &DividedPowerPoly::monomial(n, exps, coef(rng));
    }
    p
}

/// A homogeneous degree-`q` form on `Δⁿ` (zero when `q > n`).
pub fn random_simplex_form(n: usize, q: usize, max_exp: u32, terms: usize, rng: &mut impl Rng) -> SimplexForm {
    let mut out = SimplexForm::zero(n);
    if q > n {
        return out;
    }
    let idx: Vec<usize> = (1..=n).collect();
    for _ in 0..rng.random_range(1..=terms.max(1)) {
        let s: Vec<usize> = {
            let mut s: Vec<usize> = idx.choose_multiple(rng, q).copied().collect();
            s.sort_unstable();
            s
        };
        let p = random_poly(n, max_exp, 2, rng);
        out = out.add(&SimplexForm::term(mask_from_indices(&s), p));
    }
    out
}

/// Barycentric coordinates `λ₀..λₘ` on `Δᵐ`.
pub fn barycentric(m: usize) -> Vec<DividedPowerPoly> {
    let x = |i: usize| {
        if i == 0 {
            DividedPowerPoly::theta_power(m, 1)
        } else if i > m {
            DividedPowerPoly::zero(m)
        } else {
            DividedPowerPoly::var(m, i)
        }
    };
    (0..=m).map(|k| &x(k) - &x(k + 1)).collect()
}

/// The functions `μ_ρ` restricted to every cell, indexed `[ρ dim][ρ][σ dim][σ]`.
struct WhitneyTable {
    mu: Vec<Vec<Vec<Vec<DividedPowerPoly>>>>,
}

impl WhitneyTable {
    #[allow(clippy::needless_range_loop)]
    fn new(space: &FiniteSimplicialSet) -> Self {
        let counts = space.counts();
        let mut mu: Vec<Vec<Vec<Vec<DividedPowerPoly>>>> = counts
            .iter()
            .map(|&c| {
                vec![counts.iter().enumerate().map(|(m, &cm)| vec![DividedPowerPoly::zero(m); cm]).collect(); c]
            })
            .collect();
        for (m, &cm) in counts.iter().enumerate() {
            let lambda = barycentric(m);
            for s in 0..cm {
                for j in 0..=m {
                    for iota in OrdinalMap::injections(j, m) {
                        let face = space.cell_face(m, s, &iota);
                        if !face.is_nondegenerate() {
                            continue;
                        }
                        let mut prod = DividedPowerPoly::one(m);
                        for &v in iota.images() {
                            prod = &prod * &lambda[v];
                        }
                        let slot = &mut mu[j][face.cell][m][s];
                        *slot = &*slot + &prod;
                    }
                }
            }
        }
        WhitneyTable { mu }
    }
}

/// Random compatible forms on a fixed space.
pub struct FormGenerator {
    space: Arc<FiniteSimplicialSet>,
    table: WhitneyTable,
    cells: Vec<(usize, usize)>,
    maximal: Vec<(usize, usize)>,
    params: GenParams,
}

impl FormGenerator {
    pub fn new(space: Arc<FiniteSimplicialSet>, params: GenParams) -> Self {
        let table = WhitneyTable::new(&space);
        let cells = space.counts().iter().enumerate().flat_map(|(k, &c)| (0..c).map(move |i| (k, i))).collect();
        let maximal = space.maximal_cells();
        FormGenerator { space, table, cells, maximal, params }
    }

    pub fn space(&self) -> &Arc<FiniteSimplicialSet> {
        &self.space
    }

    fn mu(&self, rho: (usize, usize), m: usize, s: usize) -> &DividedPowerPoly {
        &self.table.mu[rho.0][rho.1][m][s]
    }

    /// A homogeneous degree-`q` form.
    pub fn form(&self, q: usize, rng: &mut impl Rng) -> SimplicialForm {
        let counts = self.space.counts();
        let mut values: Vec<Vec<SimplexForm>> =
            counts.iter().enumerate().map(|(m, &c)| vec![SimplexForm::zero(m); c]).collect();
        let small: Vec<(usize, usize)> = self.cells.iter().copied().filter(|c| c.0 <= 1).collect();
        for _ in 0..self.params.terms {
            let c = coef(rng);
            let a = rng.random_range(0..=self.params.max_exp.min(2));
            let mut budget = rng.random_range(0..=self.params.max_exp) as usize;
            let mut factors = Vec::new();
            while budget > 0 {
                let fits: Vec<_> = self.cells.iter().copied().filter(|c| c.0 < budget).collect();
                let Some(&rho) = fits.choose(rng) else { break };
                budget -= rho.0 + 1;
                factors.push(rho);
            }
            let diffs: Vec<(usize, usize)> = (0..q).filter_map(|_| small.choose(rng).copied()).collect();
            for (m, level) in values.iter_mut().enumerate() {
                if q > m {
                    continue;
                }
                for (s, slot) in level.iter_mut().enumerate() {
                    let mut p = &DividedPowerPoly::theta_power(m, a) * &DividedPowerPoly::constant(m, c.clone());
                    for &rho in &factors {
                        p = &p * self.mu(rho, m, s);
                    }
                    let mut w = SimplexForm::from_poly(p);
                    for &rho in &diffs {
                        if w.is_zero() {
                            break;
                        }
                        w = w.wedge(&SimplexForm::from_poly(self.mu(rho, m, s).clone()).d());
                    }
                    *slot = slot.add(&w);
                }
            }
        }
        for &(m, s) in &self.maximal {
            if q > m || m == 0 || !rng.random_bool(0.5) {
                continue;
            }
            let idx: Vec<usize> = (1..=m).collect();
            let mut sidx: Vec<usize> = idx.choose_multiple(rng, q).copied().collect();
            sidx.sort_unstable();
            let mono = random_poly(m, 1, 1, rng);
            let p = if q == m {
                mono
            } else {
                barycentric(m).iter().fold(mono, |acc, l| &acc * l)
            };
            values[m][s] = values[m][s].add(&SimplexForm::term(mask_from_indices(&sidx), p));
        }
        SimplicialForm::new_unchecked(self.space.clone(), values).expect("generated shape")
    }

    /// A nonzero homogeneous form with a nonconstant part: constant letters
    /// are zero in the bar complex, so such draws are retried.
    pub fn letter(&self, q: usize, rng: &mut impl Rng) -> SimplicialForm {
        for _ in 0..16 {
            let f = self.form(q, rng);
            if !f.is_zero() && !is_global_constant(&f) {
                return f;
            }
        }
        self.form(q, rng)
    }
}

/// Whether a form is `c · 1` for a `ℤ⟨ϑ⟩` scalar `c`.
pub fn is_global_constant(f: &SimplicialForm) -> bool {
    let Ok(v0) = f.at_vertex(0) else { return true };
    if f.degree().is_some_and(|d| d > 0) {
        return false;
    }
    match SimplicialForm::constant(f.space().clone(), &v0) {
        Ok(c) => c == *f,
        Err(_) => false,
    }
}

/// A random `n`-simplex of `X` (degenerate when `X` is too small).
pub fn random_simplex(space: &FiniteSimplicialSet, n: usize, rng: &mut impl Rng) -> Result<Simplex> {
    let k = rng.random_range(0..=n.min(space.max_dim()));
    let count = space.cells(k).len();
    if count == 0 {
        let v = rng.random_range(0..space.cells(0).len().max(1));
        return space.apply(&Simplex::cell(0, v), &OrdinalMap::constant(n, 0, 0));
    }
    let c = rng.random_range(0..count);
    let surj = OrdinalMap::surjections(n, k);
    let s = surj.choose(rng).ok_or_else(|| Error::InvalidArgument("no surjection".into()))?;
    space.apply(&Simplex::cell(k, c), s)
}

/// A random monotone `h : [n] × [1] -> [k]` with `h(i, 0) < h(i, 1)` when
/// `k ≥ 1`, so no vertex of `Δⁿ` is carried by a constant path.
pub fn random_poset_map(n: usize, k: usize, rng: &mut impl Rng) -> Vec<[usize; 2]> {
    let lift = usize::from(k >= 1);
    let mut bottom: Vec<usize> = (0..=n).map(|_| rng.random_range(0..=k - lift)).collect();
    bottom.sort_unstable();
    let mut top: Vec<usize> = bottom.iter().map(|&b| rng.random_range(b + lift..=k)).collect();
    for i in 1..=n {
        top[i] = top[i].max(top[i - 1]);
    }
    bottom.iter().zip(&top).map(|(&b, &t)| [b, t]).collect()
}

/// A random path `n`-simplex `(i, ε) ↦ s(h(i, ε))` through a maximal cell;
/// cells of dimension `≤ n` are first degenerated to dimension `n + 1`.
pub fn random_path(space: &Arc<FiniteSimplicialSet>, n: usize, rng: &mut impl Rng) -> Result<PathSimplex> {
    let top = space.maximal_cells();
    let &(m, c) = top.choose(rng).ok_or_else(|| Error::InvalidArgument("empty space".into()))?;
    let s = if m > n {
        Simplex::cell(m, c)
    } else {
        let surj = OrdinalMap::surjections(n + 1, m);
        let sigma = surj.choose(rng).expect("nonempty");
        space.apply(&Simplex::cell(m, c), sigma)?
    };
    let h = random_poset_map(n, s.dim(), rng);
    PathSimplex::from_poset_map(n, &h, space.clone(), &s)
}

/// A random chain of `[n] × [r]`.
pub fn random_chain(n: usize, r: usize, rng: &mut impl Rng) -> MaximalChain {
    let all = MaximalChain::enumerate(n, r);
    all.choose(rng).expect("at least one chain").clone()
}
