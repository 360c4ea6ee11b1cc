//! Finite simplicial sets in Eilenberg–Zilber normal form.
//!
//! A set is stored by its nondegenerate cells; each cell records its faces as
//! [`Simplex`] values `(cell, degeneracy)`. All faces along all injections are
//! tabulated at construction, so applying an ordinal map is a table lookup.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{MaximalChain, OrdinalMap};

/// Hard limit on cell dimension, keeping face tables small.
pub const MAX_SSET_DIM: usize = 10;

/// A possibly degenerate simplex `s*(c)`: a nondegenerate cell `c` of
/// dimension `k` and a surjection `s : [m] ↠ [k]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Simplex {
    pub cell: usize,
    pub degeneracy: OrdinalMap,
}

impl Simplex {
    pub fn cell(dim: usize, index: usize) -> Self {
        Simplex { cell: index, degeneracy: OrdinalMap::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.degeneracy.source_dim()
    }

    pub fn cell_dim(&self) -> usize {
        self.degeneracy.target_dim()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.degeneracy.is_identity()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Cell {
    pub name: String,
    pub faces: Vec<Simplex>,
}

#[derive(Clone, Debug)]
struct ProductData {
    left: Arc<FiniteSimplicialSet>,
    right: Arc<FiniteSimplicialSet>,
    /// The pair of simplices behind each cell.
    pairs: Vec<Vec<(Simplex, Simplex)>>,
    index: Vec<HashMap<(Simplex, Simplex), usize>>,
}

/// A finite simplicial set truncated at `max_dim`.
#[derive(Clone, Debug)]
pub struct FiniteSimplicialSet {
    descriptor: String,
    cells: Vec<Vec<Cell>>,
    /// `face_table[k][c][mask]`: the face of cell `(k, c)` spanned by the
    /// vertices in `mask`.
    face_table: Vec<Vec<Vec<Simplex>>>,
    /// Present when cells are determined by their vertex lists.
    nerve: Option<Vec<HashMap<Vec<usize>, usize>>>,
    product: Option<ProductData>,
}

impl PartialEq for FiniteSimplicialSet {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor && self.cells == other.cells
    }
}

impl Eq for FiniteSimplicialSet {}

fn injection_to_mask(mono: &OrdinalMap) -> u32 {
    mono.images().iter().fold(0, |m, &i| m | (1 << i))
}

impl FiniteSimplicialSet {
    /// Builds a set from explicit cells, checking face data and the
    /// simplicial identities `dᵢdⱼ = dⱼ₋₁dᵢ` for `i < j`.
    pub fn from_cells(descriptor: impl Into<String>, cells: Vec<Vec<Cell>>) -> Result<Self> {
        let bad = |m: String| Error::InvalidSimplicialSet(m);
        if cells.len() > MAX_SSET_DIM + 1 {
            return Err(bad(format!("dimension above {MAX_SSET_DIM}")));
        }
        for (k, level) in cells.iter().enumerate() {
            for c in level {
                let expected = if k == 0 { 0 } else { k + 1 };
                if c.faces.len() != expected {
                    return Err(bad(format!("cell {} of dimension {k} has {} faces", c.name, c.faces.len())));
                }
                for f in &c.faces {
                    if f.dim() + 1 != k {
                        return Err(bad(format!("face of {} has dimension {}", c.name, f.dim())));
                    }
                    if !f.degeneracy.is_surjective() {
                        return Err(bad(format!("face of {} has a non-surjective degeneracy", c.name)));
                    }
                    if f.cell >= cells[f.cell_dim()].len() {
                        return Err(bad(format!("face of {} points at a missing cell", c.name)));
                    }
                }
            }
        }
        let mut set = FiniteSimplicialSet {
            descriptor: descriptor.into(),
            cells,
            face_table: Vec::new(),
            nerve: None,
            product: None,
        };
        set.build_face_table()?;
        set.check_identities()?;
        set.build_nerve_index();
        Ok(set)
    }

    fn build_face_table(&mut self) -> Result<()> {
        let mut table: Vec<Vec<Vec<Simplex>>> = Vec::with_capacity(self.cells.len());
        for (k, level) in self.cells.iter().enumerate() {
            let mut level_table = Vec::with_capacity(level.len());
            for (ci, cell) in level.iter().enumerate() {
                let full = (1u32 << (k + 1)) - 1;
                let mut row = vec![Simplex::cell(0, 0); full as usize + 1];
                row[full as usize] = Simplex::cell(k, ci);
                for mask in 1..full {
                    let i = (0..=k).find(|&i| mask & (1 << i) == 0).unwrap();
                    let face = &cell.faces[i];
                    // vertices of the face are [0..=k] \ {i}, renumbered
                    let rest: Vec<usize> =
                        (0..=k).filter(|&v| mask & (1 << v) != 0).map(|v| if v > i { v - 1 } else { v }).collect();
                    let mu = OrdinalMap::new(k - 1, rest)?;
                    let composite = face.degeneracy.compose(&mu)?;
                    let (eps, mono) = composite.epi_mono();
                    let base = &table[face.cell_dim()][face.cell][injection_to_mask(&mono) as usize];
                    row[mask as usize] = Simplex { cell: base.cell, degeneracy: base.degeneracy.compose(&eps)? };
                }
                level_table.push(row);
            }
            table.push(level_table);
        }
        self.face_table = table;
        Ok(())
    }

    fn check_identities(&self) -> Result<()> {
        for (k, level) in self.cells.iter().enumerate().skip(2) {
            for cell in level {
                for j in 0..=k {
                    for i in 0..j {
                        let a = self.apply(&cell.faces[j], &OrdinalMap::coface(k - 1, i))?;
                        let b = self.apply(&cell.faces[i], &OrdinalMap::coface(k - 1, j - 1))?;
                        if a != b {
                            return Err(Error::InvalidSimplicialSet(format!(
                                "d{i}d{j} != d{}d{i} on cell {}",
                                j - 1,
                                cell.name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn build_nerve_index(&mut self) {
        let mut index = Vec::new();
        for k in 0..self.cells.len() {
            let mut map = HashMap::new();
            for c in 0..self.cells[k].len() {
                let v = self.vertices(k, c);
                if v.windows(2).any(|w| w[0] == w[1]) || map.insert(v, c).is_some() {
                    return;
                }
            }
            index.push(map);
        }
        self.nerve = Some(index);
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn max_dim(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn cells(&self, k: usize) -> &[Cell] {
        self.cells.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn all_cells(&self) -> &[Vec<Cell>] {
        &self.cells
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(|l| l.len()).collect()
    }

    /// Cells that are not a face of any other cell.
    pub fn maximal_cells(&self) -> Vec<(usize, usize)> {
        let mut used: Vec<Vec<bool>> = self.cells.iter().map(|l| vec![false; l.len()]).collect();
        for level in &self.cells {
            for c in level {
                for f in &c.faces {
                    used[f.cell_dim()][f.cell] = true;
                }
            }
        }
        let mut out = Vec::new();
        for (k, level) in used.iter().enumerate() {
            for (c, &u) in level.iter().enumerate() {
                if !u {
                    out.push((k, c));
                }
            }
        }
        out
    }

    /// Vertex cells of cell `(k, c)` in order.
    pub fn vertices(&self, k: usize, c: usize) -> Vec<usize> {
        (0..=k).map(|v| self.face_table[k][c][1 << v].cell).collect()
    }

    pub fn is_nerve(&self) -> bool {
        self.nerve.is_some()
    }

    /// The face of a cell spanned by an injection `[j] ↪ [k]`.
    pub fn cell_face(&self, k: usize, c: usize, mono: &OrdinalMap) -> &Simplex {
        &self.face_table[k][c][injection_to_mask(mono) as usize]
    }

    pub fn check_simplex(&self, s: &Simplex) -> Result<()> {
        let k = s.cell_dim();
        if k > self.max_dim() || s.cell >= self.cells[k].len() {
            return Err(Error::InvalidArgument(format!("no cell {} in dimension {k} of {}", s.cell, self.descriptor)));
        }
        if !s.degeneracy.is_surjective() {
            return Err(Error::InvalidArgument("degeneracy is not surjective".into()));
        }
        Ok(())
    }

    /// `α*(s)` for `α : [p] -> [m]` and an `m`-simplex `s`.
    pub fn apply(&self, s: &Simplex, alpha: &OrdinalMap) -> Result<Simplex> {
        let composite = s.degeneracy.compose(alpha)?;
        let (eps, mono) = composite.epi_mono();
        let face = self.cell_face(s.cell_dim(), s.cell, &mono);
        Ok(Simplex { cell: face.cell, degeneracy: face.degeneracy.compose(&eps)? })
    }

    pub fn face(&self, s: &Simplex, i: usize) -> Result<Simplex> {
        if s.dim() == 0 {
            return Err(Error::InvalidArgument("vertices have no faces".into()));
        }
        self.apply(s, &OrdinalMap::coface(s.dim(), i))
    }

    /// The simplex of a nerve with the given (weakly increasing) vertex list.
    pub fn simplex_from_vertices(&self, verts: &[usize]) -> Result<Simplex> {
        let nerve = self
            .nerve
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("{} is not determined by vertex lists", self.descriptor)))?;
        let mut distinct: Vec<usize> = Vec::new();
        let mut images = Vec::with_capacity(verts.len());
        for &v in verts {
            if distinct.last() != Some(&v) {
                distinct.push(v);
            }
            images.push(distinct.len() - 1);
        }
        let k = distinct.len() - 1;
        let cell = nerve
            .get(k)
            .and_then(|m| m.get(&distinct))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("no simplex with vertices {verts:?}")))?;
        Ok(Simplex { cell, degeneracy: OrdinalMap::new(k, images)? })
    }

    pub fn simplex_name(&self, s: &Simplex) -> String {
        let name = &self.cells[s.cell_dim()][s.cell].name;
        if s.is_nondegenerate() {
            name.clone()
        } else {
            format!("{name}{}", s.degeneracy)
        }
    }

    // ---- presets ----

    /// The standard simplex `Δⁿ`; cells are the injections `[k] ↪ [n]` in
    /// lexicographic order of vertex lists.
    pub fn standard(n: usize) -> Result<Self> {
        Self::simplex_like(format!("simplex:{n}"), n, |_| true)
    }

    /// `∂Δⁿ` for `n ≥ 1`.
    pub fn boundary(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("boundary:n needs n ≥ 1".into()));
        }
        Self::simplex_like(format!("boundary:{n}"), n, |v| v.len() <= n)
    }

    /// The horn `Λᵏₙ`: `∂Δⁿ` without the face opposite vertex `k`.
    pub fn horn(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::InvalidArgument(format!("horn:{n}:{k} needs 0 ≤ k ≤ n, n ≥ 1")));
        }
        Self::simplex_like(format!("horn:{n}:{k}"), n, |v| v.len() <= n && !(v.len() == n && !v.contains(&k)))
    }

    fn simplex_like(descriptor: String, n: usize, keep: impl Fn(&[usize]) -> bool) -> Result<Self> {
        if n > MAX_SSET_DIM {
            return Err(Error::InvalidArgument(format!("dimension above {MAX_SSET_DIM}")));
        }
        let mut cells = Vec::new();
        let mut index: Vec<HashMap<Vec<usize>, usize>> = Vec::new();
        for k in 0..=n {
            let mut level = Vec::new();
            let mut map = HashMap::new();
            for inj in OrdinalMap::injections(k, n) {
                let verts = inj.images().to_vec();
                if !keep(&verts) {
                    continue;
                }
                let faces = if k == 0 {
                    Vec::new()
                } else {
                    (0..=k)
                        .map(|i| {
                            let mut f = verts.clone();
                            f.remove(i);
                            Simplex::cell(k - 1, index[k - 1][&f])
                        })
                        .collect()
                };
                map.insert(verts.clone(), level.len());
                level.push(Cell { name: verts.iter().map(|v| v.to_string()).collect(), faces });
            }
            if level.is_empty() {
                break;
            }
            cells.push(level);
            index.push(map);
        }
        Self::from_cells(descriptor, cells)
    }

    /// `Δ¹/∂Δ¹`: one vertex `v` and one edge `e` with both faces `v`.
    pub fn circle() -> Result<Self> {
        let v = Cell { name: "v".into(), faces: vec![] };
        let e = Cell { name: "e".into(), faces: vec![Simplex::cell(0, 0), Simplex::cell(0, 0)] };
        Self::from_cells("circle", vec![vec![v], vec![e]])
    }

    /// `Δⁿ/∂Δⁿ` for `n ≥ 1`: one vertex and one `n`-cell whose faces are
    /// all degenerate on it. `sphere:1` is the circle under another name.
    pub fn sphere(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SSET_DIM {
            return Err(Error::InvalidArgument(format!("sphere:n needs 1 ≤ n ≤ {MAX_SSET_DIM}")));
        }
        let point = Simplex { cell: 0, degeneracy: OrdinalMap::constant(n - 1, 0, 0) };
        let mut cells = vec![vec![Cell { name: "v".into(), faces: vec![] }]];
        cells.extend((1..n).map(|_| Vec::new()));
        cells.push(vec![Cell { name: "c".into(), faces: vec![point; n + 1] }]);
        Self::from_cells(format!("sphere:{n}"), cells)
    }

    /// `A × B` truncated at dimension `cutoff` (default `dim A + dim B`).
    pub fn product(a: Arc<Self>, b: Arc<Self>, cutoff: Option<usize>) -> Result<Self> {
        let d = cutoff.unwrap_or(a.max_dim() + b.max_dim());
        if d > MAX_SSET_DIM {
            return Err(Error::InvalidArgument(format!("product cutoff above {MAX_SSET_DIM}")));
        }
        let descriptor = format!("product:{}:{}:{d}", a.descriptor, b.descriptor);
        let all_simplices = |x: &Self, m: usize| -> Vec<Simplex> {
            let mut out = Vec::new();
            for k in 0..=m.min(x.max_dim()) {
                for sur in OrdinalMap::surjections(m, k) {
                    for c in 0..x.cells[k].len() {
                        out.push(Simplex { cell: c, degeneracy: sur.clone() });
                    }
                }
            }
            out
        };
        let mut cells: Vec<Vec<Cell>> = Vec::new();
        let mut pairs: Vec<Vec<(Simplex, Simplex)>> = Vec::new();
        let mut index: Vec<HashMap<(Simplex, Simplex), usize>> = Vec::new();
        for m in 0..=d {
            let mut level = Vec::new();
            let mut level_pairs = Vec::new();
            let mut map = HashMap::new();
            let sa = all_simplices(&a, m);
            let sb = all_simplices(&b, m);
            for x in &sa {
                for y in &sb {
                    if !jointly_nondegenerate(x, y) {
                        continue;
                    }
                    let faces = if m == 0 {
                        Vec::new()
                    } else {
                        (0..=m)
                            .map(|i| {
                                let di = OrdinalMap::coface(m, i);
                                normalize_pair(&a.apply(x, &di)?, &b.apply(y, &di)?, &index)
                            })
                            .collect::<Result<Vec<_>>>()?
                    };
                    map.insert((x.clone(), y.clone()), level.len());
                    level.push(Cell { name: format!("({},{})", a.simplex_name(x), b.simplex_name(y)), faces });
                    level_pairs.push((x.clone(), y.clone()));
                }
            }
            if level.is_empty() {
                break;
            }
            cells.push(level);
            pairs.push(level_pairs);
            index.push(map);
        }
        let mut set = Self::from_cells(descriptor, cells)?;
        set.product = Some(ProductData { left: a, right: b, pairs, index });
        Ok(set)
    }

    pub fn factors(&self) -> Option<(&Arc<Self>, &Arc<Self>)> {
        self.product.as_ref().map(|p| (&p.left, &p.right))
    }

    /// The pair of simplices behind a product cell.
    pub fn product_pair(&self, k: usize, c: usize) -> Option<&(Simplex, Simplex)> {
        self.product.as_ref().map(|p| &p.pairs[k][c])
    }

    /// The simplex `(x, y)` of a product set.
    pub fn pair(&self, x: &Simplex, y: &Simplex) -> Result<Simplex> {
        let p = self.product.as_ref().ok_or_else(|| Error::InvalidArgument(format!("{} is not a product", self.descriptor)))?;
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
        }
        normalize_pair(x, y, &p.index)
    }

    /// Parses a preset: `simplex:n`, `boundary:n`, `horn:n:k`, `circle`, `sphere:n`, or
    /// `product:A:B[:D]` with nested presets `A`, `B`.
    pub fn preset(spec: &str) -> Result<Self> {
        let tokens: Vec<&str> = spec.split(':').map(str::trim).collect();
        let mut pos = 0;
        let set = parse_preset(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!("trailing tokens in preset {spec:?}")));
        }
        Ok(set)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "descriptor": self.descriptor,
            "counts": self.counts(),
            "cells": self.cells,
        })
    }
}

fn parse_num(tokens: &[&str], pos: &mut usize) -> Result<usize> {
    let t = tokens.get(*pos).ok_or_else(|| Error::Parse("preset ended early".into()))?;
    *pos += 1;
    t.parse().map_err(|_| Error::Parse(format!("expected a number, found {t:?}")))
}

fn parse_preset(tokens: &[&str], pos: &mut usize) -> Result<FiniteSimplicialSet> {
    let kind = *tokens.get(*pos).ok_or_else(|| Error::Parse("empty preset".into()))?;
    *pos += 1;
    match kind {
        "simplex" => FiniteSimplicialSet::standard(parse_num(tokens, pos)?),
        "boundary" => FiniteSimplicialSet::boundary(parse_num(tokens, pos)?),
        "horn" => {
            let n = parse_num(tokens, pos)?;
            let k = parse_num(tokens, pos)?;
            FiniteSimplicialSet::horn(n, k)
        }
        "circle" => FiniteSimplicialSet::circle(),
        "sphere" => FiniteSimplicialSet::sphere(parse_num(tokens, pos)?),
        "product" => {
            let a = parse_preset(tokens, pos)?;
            let b = parse_preset(tokens, pos)?;
            let d = match tokens.get(*pos) {
                Some(t) if t.chars().all(|c| c.is_ascii_digit()) && !t.is_empty() => Some(parse_num(tokens, pos)?),
                _ => None,
            };
            FiniteSimplicialSet::product(Arc::new(a), Arc::new(b), d)
        }
        other => Err(Error::Parse(format!("unknown preset {other:?}"))),
    }
}

fn jointly_nondegenerate(x: &Simplex, y: &Simplex) -> bool {
    let (a, b) = (x.degeneracy.images(), y.degeneracy.images());
    !(0..a.len().saturating_sub(1)).any(|j| a[j] == a[j + 1] && b[j] == b[j + 1])
}

/// Collapses the common degeneracy of a pair and looks up the cell.
fn normalize_pair(x: &Simplex, y: &Simplex, index: &[HashMap<(Simplex, Simplex), usize>]) -> Result<Simplex> {
    let (a, b) = (x.degeneracy.images(), y.degeneracy.images());
    let mut eps = vec![0usize];
    for j in 1..a.len() {
        let last = *eps.last().unwrap();
        eps.push(if a[j] == a[j - 1] && b[j] == b[j - 1] { last } else { last + 1 });
    }
    let q = *eps.last().unwrap();
    let mut ra = vec![0; q + 1];
    let mut rb = vec![0; q + 1];
    for j in 0..a.len() {
        ra[eps[j]] = a[j];
        rb[eps[j]] = b[j];
    }
    let xr = Simplex { cell: x.cell, degeneracy: OrdinalMap::new(x.cell_dim(), ra)? };
    let yr = Simplex { cell: y.cell, degeneracy: OrdinalMap::new(y.cell_dim(), rb)? };
    let cell = index
        .get(q)
        .and_then(|m| m.get(&(xr, yr)))
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("simplex of dimension {q} beyond product cutoff")))?;
    Ok(Simplex { cell, degeneracy: OrdinalMap::new(q, eps)? })
}

impl fmt::Display for FiniteSimplicialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.descriptor, self.counts())
    }
}

#[derive(Serialize, Deserialize)]
struct ExplicitSet {
    #[serde(default = "custom")]
    descriptor: String,
    cells: Vec<Vec<Cell>>,
}

fn custom() -> String {
    "custom".into()
}

/// JSON reference to a space: a preset string or an explicit cell list.
pub fn space_from_json(v: &serde_json::Value) -> Result<FiniteSimplicialSet> {
    match v {
        serde_json::Value::String(s) => FiniteSimplicialSet::preset(s),
        serde_json::Value::Object(o) if o.contains_key("preset") => {
            FiniteSimplicialSet::preset(o["preset"].as_str().ok_or_else(|| Error::Parse("preset must be a string".into()))?)
        }
        other => {
            let e: ExplicitSet = serde_json::from_value(other.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            FiniteSimplicialSet::from_cells(e.descriptor, e.cells)
        }
    }
}

/// JSON reference to a space: its descriptor when it is a preset.
pub fn space_to_json(x: &FiniteSimplicialSet) -> serde_json::Value {
    if FiniteSimplicialSet::preset(&x.descriptor).map(|p| p == *x).unwrap_or(false) {
        serde_json::Value::String(x.descriptor.clone())
    } else {
        serde_json::json!({ "descriptor": x.descriptor, "cells": x.cells })
    }
}

/// A simplicial map, stored by the images of nondegenerate source cells.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    source: Arc<FiniteSimplicialSet>,
    target: Arc<FiniteSimplicialSet>,
    images: Vec<Vec<Simplex>>,
}

impl SimplicialMap {
    pub fn new(source: Arc<FiniteSimplicialSet>, target: Arc<FiniteSimplicialSet>, images: Vec<Vec<Simplex>>) -> Result<Self> {
        let bad = |m: String| Error::InvalidSimplicialMap(m);
        if images.len() != source.cells.len() {
            return Err(bad("image list does not match source dimensions".into()));
        }
        for (k, level) in images.iter().enumerate() {
            if level.len() != source.cells[k].len() {
                return Err(bad(format!("wrong number of images in dimension {k}")));
            }
            for s in level {
                if s.dim() != k {
                    return Err(bad(format!("image of a {k}-cell has dimension {}", s.dim())));
                }
                target.check_simplex(s).map_err(|e| bad(e.to_string()))?;
            }
        }
        let f = SimplicialMap { source, target, images };
        for (k, level) in f.source.cells.iter().enumerate().skip(1) {
            for (c, cell) in level.iter().enumerate() {
                for (i, face) in cell.faces.iter().enumerate() {
                    let lhs = f.target.apply(&f.images[k][c], &OrdinalMap::coface(k, i))?;
                    let rhs = f.apply(face)?;
                    if lhs != rhs {
                        return Err(bad(format!("face {i} of cell {} is not preserved", cell.name)));
                    }
                }
            }
        }
        Ok(f)
    }

    /// The map `Δᵏ -> X` classifying a `k`-simplex.
    pub fn from_simplex(target: Arc<FiniteSimplicialSet>, s: &Simplex) -> Result<Self> {
        target.check_simplex(s)?;
        let source = Arc::new(FiniteSimplicialSet::standard(s.dim())?);
        let mut images = Vec::new();
        for k in 0..=s.dim() {
            let mut level = Vec::new();
            for c in 0..source.cells[k].len() {
                let verts = source.vertices(k, c);
                level.push(target.apply(s, &OrdinalMap::new(s.dim(), verts)?)?);
            }
            images.push(level);
        }
        Self::new(source, target, images)
    }

    pub fn identity(x: Arc<FiniteSimplicialSet>) -> Self {
        let images = x.cells.iter().enumerate().map(|(k, l)| (0..l.len()).map(|c| Simplex::cell(k, c)).collect()).collect();
        SimplicialMap { source: x.clone(), target: x, images }
    }

    pub fn source(&self) -> &Arc<FiniteSimplicialSet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteSimplicialSet> {
        &self.target
    }

    pub fn images(&self) -> &[Vec<Simplex>] {
        &self.images
    }

    /// `f(s)` for a simplex `s` of the source.
    pub fn apply(&self, s: &Simplex) -> Result<Simplex> {
        let img = &self.images[s.cell_dim()][s.cell];
        self.target.apply(img, &s.degeneracy)
    }

    pub fn compose(&self, inner: &SimplicialMap) -> Result<SimplicialMap> {
        if *inner.target != *self.source {
            return Err(Error::SpaceMismatch(inner.target.descriptor.clone(), self.source.descriptor.clone()));
        }
        let images = inner.images.iter().map(|l| l.iter().map(|s| self.apply(s)).collect()).collect::<Result<_>>()?;
        Self::new(inner.source.clone(), self.target.clone(), images)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "source": space_to_json(&self.source),
            "target": space_to_json(&self.target),
            "images": self.images,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let source = Arc::new(space_from_json(v.get("source").ok_or_else(|| Error::Parse("missing source".into()))?)?);
        let target = Arc::new(space_from_json(v.get("target").ok_or_else(|| Error::Parse("missing target".into()))?)?);
        let images: Vec<Vec<Simplex>> = serde_json::from_value(v.get("images").cloned().unwrap_or_default())
            .map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(source, target, images)
    }
}

/// The `(n+r)`-simplex `(Γ_b, Γ_f)` of `Δⁿ × Δʳ`.
pub fn top_chain_simplex(prism: &FiniteSimplicialSet, chain: &MaximalChain) -> Result<Simplex> {
    let (a, b) = prism.factors().ok_or_else(|| Error::InvalidArgument("not a product".into()))?;
    let (gb, gf) = chain.projections();
    prism.pair(&a.simplex_from_vertices(gb.images())?, &b.simplex_from_vertices(gf.images())?)
}

/// `(Δ¹)ʳ` as the left-nested product `((Δ¹ × Δ¹) × ⋯) × Δ¹`.
pub fn cube(r: usize) -> Result<FiniteSimplicialSet> {
    if r == 0 {
        return FiniteSimplicialSet::standard(0);
    }
    let mut x = FiniteSimplicialSet::standard(1)?;
    for _ in 1..r {
        x = FiniteSimplicialSet::product(Arc::new(x), Arc::new(FiniteSimplicialSet::standard(1)?), Some(r))?;
    }
    Ok(x)
}

/// `ι_r : Δʳ -> (Δ¹)ʳ`, `k ↦ (1,…,1,0,…,0)` with `k` ones.
pub fn iota(r: usize) -> Result<SimplicialMap> {
    let target = Arc::new(cube(r)?);
    let components: Vec<Vec<usize>> = (1..=r).map(|j| (0..=r).map(|k| usize::from(k >= j)).collect()).collect();
    let s = cube_simplex(&target, r, &components)?;
    SimplicialMap::from_simplex(target, &s)
}

/// The simplex of `(Δ¹)ʳ` with the given component vertex sequences.
pub fn cube_simplex(cube: &FiniteSimplicialSet, r: usize, components: &[Vec<usize>]) -> Result<Simplex> {
    if r == 0 {
        return Ok(Simplex { cell: 0, degeneracy: OrdinalMap::constant(0, 0, 0) });
    }
    if r == 1 {
        return cube.simplex_from_vertices(&components[0]);
    }
    let (left, right) = cube.factors().expect("cube is a product");
    let x = cube_simplex(left, r - 1, &components[..r - 1])?;
    let y = right.simplex_from_vertices(&components[r - 1])?;
    cube.pair(&x, &y)
}
