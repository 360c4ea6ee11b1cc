//! Ordinal maps `[m] -> [n]` of the simplex category and maximal chains of
//! the poset `[n] x [r]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An order-preserving map `[m] -> [n]`, stored by its list of images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "OrdinalMapRepr", into = "OrdinalMapRepr")]
pub struct OrdinalMap {
    target: usize,
    images: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct OrdinalMapRepr {
    n: usize,
    images: Vec<usize>,
}

impl TryFrom<OrdinalMapRepr> for OrdinalMap {
    type Error = Error;
    fn try_from(r: OrdinalMapRepr) -> Result<Self> {
        OrdinalMap::new(r.n, r.images)
    }
}

impl From<OrdinalMap> for OrdinalMapRepr {
    fn from(m: OrdinalMap) -> Self {
        OrdinalMapRepr { n: m.target, images: m.images }
    }
}

impl OrdinalMap {
    pub fn new(target: usize, images: Vec<usize>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::InvalidOrdinalMap("empty source".into()));
        }
        if let Some(&v) = images.iter().find(|&&v| v > target) {
            return Err(Error::InvalidOrdinalMap(format!("image {v} exceeds target {target}")));
        }
        if images.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidOrdinalMap(format!("{images:?} is not monotone")));
        }
        Ok(OrdinalMap { target, images })
    }

    pub fn identity(n: usize) -> Self {
        OrdinalMap { target: n, images: (0..=n).collect() }
    }

    pub fn constant(source: usize, target: usize, value: usize) -> Self {
        assert!(value <= target);
        OrdinalMap { target, images: vec![value; source + 1] }
    }

    /// The coface `δ_i : [n-1] -> [n]` skipping `i`.
    pub fn coface(n: usize, i: usize) -> Self {
        assert!(n >= 1 && i <= n, "coface δ_{i} into [{n}]");
        OrdinalMap { target: n, images: (0..n).map(|k| if k < i { k } else { k + 1 }).collect() }
    }

    /// The codegeneracy `σ_i : [n+1] -> [n]` hitting `i` twice.
    pub fn codegeneracy(n: usize, i: usize) -> Self {
        assert!(i <= n, "codegeneracy σ_{i} onto [{n}]");
        OrdinalMap { target: n, images: (0..=n + 1).map(|k| if k <= i { k } else { k - 1 }).collect() }
    }

    pub fn source_dim(&self) -> usize {
        self.images.len() - 1
    }

    pub fn target_dim(&self) -> usize {
        self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &OrdinalMap) -> Result<OrdinalMap> {
        if inner.target != self.source_dim() {
            return Err(Error::DimensionMismatch { expected: self.source_dim(), found: inner.target });
        }
        Ok(OrdinalMap { target: self.target, images: inner.images.iter().map(|&j| self.images[j]).collect() })
    }

    pub fn is_identity(&self) -> bool {
        self.target == self.source_dim() && self.images.iter().enumerate().all(|(k, &v)| k == v)
    }

    pub fn is_injective(&self) -> bool {
        self.images.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        self.images[0] == 0
            && *self.images.last().unwrap() == self.target
            && self.images.windows(2).all(|w| w[1] - w[0] <= 1)
    }

    /// Epi-mono factorization `self = mono ∘ epi`.
    pub fn epi_mono(&self) -> (OrdinalMap, OrdinalMap) {
        let mut image: Vec<usize> = self.images.clone();
        image.dedup();
        let k = image.len() - 1;
        let mut epi = Vec::with_capacity(self.images.len());
        let mut pos = 0;
        for &v in &self.images {
            while image[pos] != v {
                pos += 1;
            }
            epi.push(pos);
        }
        (OrdinalMap { target: k, images: epi }, OrdinalMap { target: self.target, images: image })
    }

    /// Smallest index of `[n]` missed by the map, if any.
    pub fn first_missed(&self) -> Option<usize> {
        (0..=self.target).find(|v| self.images.binary_search(v).is_err())
    }

    /// Every order-preserving map `[m] -> [n]`, in lexicographic order of images.
    pub fn all(m: usize, n: usize) -> Vec<OrdinalMap> {
        fn rec(pos: usize, lo: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<OrdinalMap>) {
            if pos == cur.len() {
                out.push(OrdinalMap { target: n, images: cur.clone() });
                return;
            }
            for v in lo..=n {
                cur[pos] = v;
                rec(pos + 1, v, n, cur, out);
            }
        }
        let mut out = Vec::new();
        rec(0, 0, n, &mut vec![0; m + 1], &mut out);
        out
    }

    /// Every surjection `[m] -> [k]`.
    pub fn surjections(m: usize, k: usize) -> Vec<OrdinalMap> {
        if k > m {
            return Vec::new();
        }
        Self::all(m, k).into_iter().filter(|s| s.is_surjective()).collect()
    }

    /// Every injection `[k] -> [n]`.
    pub fn injections(k: usize, n: usize) -> Vec<OrdinalMap> {
        if k > n {
            return Vec::new();
        }
        Self::all(k, n).into_iter().filter(|s| s.is_injective()).collect()
    }
}

impl fmt::Display for OrdinalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]->[{}] (", self.source_dim(), self.target)?;
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Step {
    /// `+1` in the fiber coordinate.
    Fiber,
    /// `+1` in the base coordinate.
    Base,
}

/// A maximal chain `Γ : [n+r] ↪ [n] x [r]`, i.e. a monotone lattice path from
/// `(0,0)` to `(n,r)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "ChainRepr", into = "ChainRepr")]
pub struct MaximalChain {
    n: usize,
    r: usize,
    steps: Vec<Step>,
}

#[derive(Serialize, Deserialize)]
struct ChainRepr {
    n: usize,
    r: usize,
    steps: String,
}

impl TryFrom<ChainRepr> for MaximalChain {
    type Error = Error;
    fn try_from(c: ChainRepr) -> Result<Self> {
        MaximalChain::parse(c.n, c.r, &c.steps)
    }
}

impl From<MaximalChain> for ChainRepr {
    fn from(c: MaximalChain) -> Self {
        ChainRepr { n: c.n, r: c.r, steps: c.step_string() }
    }
}

/// The order-preserving maps a chain induces on indices:
/// `b_Γ : [n] -> [n+r]`, `f_Γ : [r] -> [n+r]` and the run bounds `u_Γ(1..=r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSections {
    pub base: OrdinalMap,
    pub fiber: OrdinalMap,
    /// `upper[i-1] = u_Γ(i)`.
    pub upper: Vec<usize>,
}

impl MaximalChain {
    pub fn new(n: usize, r: usize, steps: Vec<Step>) -> Result<Self> {
        let bases = steps.iter().filter(|s| **s == Step::Base).count();
        if bases != n || steps.len() != n + r {
            return Err(Error::InvalidChain(format!("steps do not reach ({n},{r})")));
        }
        Ok(MaximalChain { n, r, steps })
    }

    pub fn parse(n: usize, r: usize, steps: &str) -> Result<Self> {
        let steps = steps
            .chars()
            .map(|c| match c {
                'S' | 's' => Ok(Step::Base),
                'F' | 'f' => Ok(Step::Fiber),
                other => Err(Error::InvalidChain(format!("unknown step {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, r, steps)
    }

    /// All maximal chains of `[n] x [r]`, ordered lexicographically by step
    /// string (`F` before `S`).
    pub fn enumerate(n: usize, r: usize) -> Vec<MaximalChain> {
        fn rec(b: usize, f: usize, cur: &mut Vec<Step>, n: usize, r: usize, out: &mut Vec<MaximalChain>) {
            if b == n && f == r {
                out.push(MaximalChain { n, r, steps: cur.clone() });
                return;
            }
            if f < r {
                cur.push(Step::Fiber);
                rec(b, f + 1, cur, n, r, out);
                cur.pop();
            }
            if b < n {
                cur.push(Step::Base);
                rec(b + 1, f, cur, n, r, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, 0, &mut Vec::new(), n, r, &mut out);
        out
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.r
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn step_string(&self) -> String {
        self.steps.iter().map(|s| if *s == Step::Base { 'S' } else { 'F' }).collect()
    }

    pub fn points(&self) -> Vec<(usize, usize)> {
        let mut pts = Vec::with_capacity(self.steps.len() + 1);
        let (mut b, mut f) = (0, 0);
        pts.push((0, 0));
        for s in &self.steps {
            match s {
                Step::Base => b += 1,
                Step::Fiber => f += 1,
            }
            pts.push((b, f));
        }
        pts
    }

    /// `Γ_b = pr₁ ∘ Γ : [n+r] -> [n]` and `Γ_f = pr₂ ∘ Γ : [n+r] -> [r]`.
    pub fn projections(&self) -> (OrdinalMap, OrdinalMap) {
        let pts = self.points();
        (
            OrdinalMap { target: self.n, images: pts.iter().map(|p| p.0).collect() },
            OrdinalMap { target: self.r, images: pts.iter().map(|p| p.1).collect() },
        )
    }

    pub fn sections(&self) -> ChainSections {
        let (gb, gf) = self.projections();
        let total = self.n + self.r;
        let base: Vec<usize> =
            (0..=self.n).map(|i| (0..=total).find(|&j| gb.apply(j) == i).unwrap()).collect();
        let fiber: Vec<usize> =
            (0..=self.r).map(|i| (0..=total).find(|&j| gf.apply(j) >= i).unwrap()).collect();
        // f_Γ(j) - j is the number of base steps before the j-th fiber step, so
        // it is constant exactly on runs of consecutive fiber steps.
        let upper = (1..=self.r)
            .map(|i| {
                let key = fiber[i] as isize - i as isize;
                let start = (1..=self.r).find(|&j| fiber[j] as isize - j as isize == key).unwrap();
                fiber[start] - 1
            })
            .collect();
        ChainSections {
            base: OrdinalMap { target: total, images: base },
            fiber: OrdinalMap { target: total, images: fiber },
            upper,
        }
    }
}

impl fmt::Display for MaximalChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Γ[{}x{}:{}]", self.n, self.r, self.step_string())
    }
}

pub fn binomial_usize(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn om(n: usize, v: &[usize]) -> OrdinalMap {
        OrdinalMap::new(n, v.to_vec()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let d0 = OrdinalMap::coface(2, 0);
        assert_eq!(OrdinalMap::identity(2).compose(&d0).unwrap(), d0);
        // d_0 s_0 = id: σ₀:[1]→[0] after δ₀:[0]→[1]
        let s0 = OrdinalMap::codegeneracy(0, 0);
        let d0 = OrdinalMap::coface(1, 0);
        assert_eq!(s0.compose(&d0).unwrap(), OrdinalMap::identity(0));
        let d1 = OrdinalMap::coface(2, 1);
        let s0 = OrdinalMap::codegeneracy(1, 0);
        assert_eq!(d1.compose(&s0).unwrap(), om(2, &[0, 0, 2]));
    }

    #[test]
    fn compose_pointwise_evaluation() {
        // the map (0,0,1,1) arises from a codegeneracy followed by a coface
        let s = om(1, &[0, 0, 1, 1]);
        let d = om(2, &[0, 1]);
        assert_eq!(d.compose(&s).unwrap(), om(2, &[0, 0, 1, 1]));
        let inner = om(1, &[0, 1, 1]);
        let outer = OrdinalMap::codegeneracy(0, 0);
        assert_eq!(outer.compose(&inner).unwrap(), om(0, &[0, 0, 0]));
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = OrdinalMap::identity(2);
        let b = OrdinalMap::identity(3);
        assert!(matches!(a.compose(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn invalid_maps_rejected() {
        assert!(OrdinalMap::new(2, vec![1, 0]).is_err());
        assert!(OrdinalMap::new(1, vec![0, 2]).is_err());
        assert!(OrdinalMap::new(1, vec![]).is_err());
    }

    #[test]
    fn epi_mono_factorization() {
        let a = om(4, &[1, 1, 3, 4, 4]);
        let (e, m) = a.epi_mono();
        assert!(e.is_surjective());
        assert!(m.is_injective());
        assert_eq!(m.compose(&e).unwrap(), a);
        assert_eq!(a.first_missed(), Some(0));
        assert_eq!(OrdinalMap::identity(3).first_missed(), None);
    }

    #[test]
    fn chain_counts() {
        assert_eq!(MaximalChain::enumerate(0, 0).len(), 1);
        assert_eq!(MaximalChain::enumerate(0, 0)[0].steps().len(), 0);
        assert_eq!(MaximalChain::enumerate(1, 1).len(), 2);
        assert_eq!(MaximalChain::enumerate(2, 1).len(), 3);
        for n in 0..=6 {
            for r in 0..=6 {
                assert_eq!(MaximalChain::enumerate(n, r).len(), binomial_usize(n + r, r));
            }
        }
    }

    #[test]
    fn chain_order_is_lexicographic() {
        let strs: Vec<String> = MaximalChain::enumerate(2, 2).iter().map(|c| c.step_string()).collect();
        let mut sorted = strs.clone();
        sorted.sort();
        assert_eq!(strs, sorted);
    }

    #[test]
    fn projections_examples() {
        let g = MaximalChain::parse(1, 1, "SF").unwrap();
        assert_eq!(g.points(), vec![(0, 0), (1, 0), (1, 1)]);
        let (b, f) = g.projections();
        assert_eq!(b.images(), &[0, 1, 1]);
        assert_eq!(f.images(), &[0, 0, 1]);
        let g = MaximalChain::parse(1, 1, "FS").unwrap();
        let (b, f) = g.projections();
        assert_eq!(b.images(), &[0, 0, 1]);
        assert_eq!(f.images(), &[0, 1, 1]);
        let g = MaximalChain::parse(0, 2, "FF").unwrap();
        assert_eq!(g.projections().0.images(), &[0, 0, 0]);
    }

    #[test]
    fn sections_examples() {
        let s = MaximalChain::parse(1, 1, "SF").unwrap().sections();
        assert_eq!(s.base.images(), &[0, 1]);
        assert_eq!(s.fiber.apply(1), 2);
        assert_eq!(s.upper, vec![1]);
        let s = MaximalChain::parse(1, 1, "FS").unwrap().sections();
        assert_eq!(s.base.images(), &[0, 2]);
        assert_eq!(s.fiber.apply(1), 1);
        assert_eq!(s.upper, vec![0]);
        let s = MaximalChain::parse(0, 1, "F").unwrap().sections();
        assert_eq!(s.fiber.apply(1), 1);
        assert_eq!(s.upper, vec![0]);
        // runs: F S F F S F → fiber steps at 1, 3, 4, 6
        let s = MaximalChain::parse(2, 4, "FSFFSF").unwrap().sections();
        assert_eq!(s.fiber.images(), &[0, 1, 3, 4, 6]);
        assert_eq!(s.base.images(), &[0, 2, 5]);
        assert_eq!(s.upper, vec![0, 2, 2, 5]);
    }

    #[test]
    fn sections_partition_indices() {
        for n in 0..=4 {
            for r in 0..=4 {
                for g in MaximalChain::enumerate(n, r) {
                    let s = g.sections();
                    let b: Vec<usize> = s.base.images()[1..].to_vec();
                    let f: Vec<usize> = s.fiber.images()[1..].to_vec();
                    assert!(b.iter().all(|x| !f.contains(x)));
                    let mut all: Vec<usize> = b.iter().chain(f.iter()).copied().collect();
                    all.sort();
                    assert_eq!(all, (1..=n + r).collect::<Vec<_>>());
                    assert_eq!(s.base.apply(0), 0);
                    assert_eq!(s.fiber.apply(0), 0);
                }
            }
        }
    }

    #[test]
    fn projections_determine_chain() {
        for n in 0..=3 {
            for r in 0..=3 {
                let chains = MaximalChain::enumerate(n, r);
                let mut seen = std::collections::HashSet::new();
                for g in &chains {
                    let (b, f) = g.projections();
                    let pts: Vec<(usize, usize)> =
                        b.images().iter().zip(f.images()).map(|(x, y)| (*x, *y)).collect();
                    let mut dedup = pts.clone();
                    dedup.dedup();
                    assert_eq!(dedup.len(), pts.len());
                    assert!(seen.insert(pts));
                }
            }
        }
    }

    #[test]
    fn json_encodings() {
        let m = om(2, &[0, 2]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":2,"images":[0,2]}"#);
        assert_eq!(serde_json::from_str::<OrdinalMap>(&s).unwrap(), m);
        assert!(serde_json::from_str::<OrdinalMap>(r#"{"n":1,"images":[1,0]}"#).is_err());
        let g = MaximalChain::parse(2, 1, "SFS").unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":2,"r":1,"steps":"SFS"}"#);
        assert_eq!(serde_json::from_str::<MaximalChain>(&s).unwrap(), g);
    }
}
