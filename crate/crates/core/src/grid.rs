//! The decomposition of `I^n` into `k^n` closed cubes of side `1/k`.
//!
//! Cells are addressed by 1-based index vectors in `[k]^n`. Linear ids follow
//! row-major (lexicographic) order, first axis most significant. All geometry
//! is exact: a cell box is stored as integer numerators over the denominator
//! `k`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::lattice::offsets_within;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShape {
    n: usize,
    k: usize,
}

impl GridShape {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 1 || k < 1 {
            return Err(Error::invalid(format!(
                "grid needs n >= 1 and k >= 1, got n={n} k={k}"
            )));
        }
        let cells = (k as u128).checked_pow(n as u32);
        match cells {
            Some(c) if c <= u32::MAX as u128 => Ok(GridShape { n, k }),
            _ => Err(Error::invalid(format!("grid {k}^{n} is too large"))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cell_count(&self) -> usize {
        self.k.pow(self.n as u32)
    }

    pub fn contains(&self, idx: &CellIndex) -> bool {
        idx.0.len() == self.n && idx.0.iter().all(|&c| c >= 1 && c as usize <= self.k)
    }

    pub fn check(&self, idx: &CellIndex) -> Result<()> {
        if self.contains(idx) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "cell index {idx:?} is not in [{}]^{}",
                self.k, self.n
            )))
        }
    }

    pub fn linear(&self, idx: &CellIndex) -> usize {
        idx.0
            .iter()
            .fold(0usize, |acc, &c| acc * self.k + (c as usize - 1))
    }

    pub fn index(&self, mut linear: usize) -> CellIndex {
        let mut coords = vec![0u32; self.n];
        for s in (0..self.n).rev() {
            coords[s] = (linear % self.k) as u32 + 1;
            linear /= self.k;
        }
        CellIndex(coords)
    }

    /// Zero-based coordinates of a linear id, written into `out`.
    pub(crate) fn coords0(&self, mut linear: usize, out: &mut [usize]) {
        for s in (0..self.n).rev() {
            out[s] = linear % self.k;
            linear /= self.k;
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.cell_count()).map(move |l| self.index(l))
    }

    /// Row-major stride of each axis.
    pub(crate) fn strides(&self) -> Vec<usize> {
        (0..self.n)
            .map(|s| self.k.pow((self.n - 1 - s) as u32))
            .collect()
    }
}

/// 1-based index `(i_1, ..., i_n)` of a cell.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellIndex(pub Vec<u32>);

impl CellIndex {
    pub fn new(coords: Vec<u32>) -> Self {
        CellIndex(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Debug for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<const N: usize> From<[u32; N]> for CellIndex {
    fn from(v: [u32; N]) -> Self {
        CellIndex(v.to_vec())
    }
}

/// A closed axis-aligned box `prod [lo_s/den, hi_s/den]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellBox {
    pub den: u64,
    pub lo: Vec<u64>,
    pub hi: Vec<u64>,
}

impl CellBox {
    /// Dimension of the intersection with another box, `-1` if empty. The
    /// boxes may have different denominators.
    pub fn intersection_dim(&self, other: &CellBox) -> i32 {
        let mut dim = 0;
        for s in 0..self.lo.len() {
            let lo = (self.lo[s] as u128 * other.den as u128)
                .max(other.lo[s] as u128 * self.den as u128);
            let hi = (self.hi[s] as u128 * other.den as u128)
                .min(other.hi[s] as u128 * self.den as u128);
            if lo > hi {
                return -1;
            }
            if lo < hi {
                dim += 1;
            }
        }
        dim
    }

    pub fn touches_lower_face(&self, axis: usize) -> bool {
        self.lo[axis] == 0
    }

    pub fn touches_upper_face(&self, axis: usize) -> bool {
        self.hi[axis] == self.den
    }
}

pub fn cube_bounds(idx: &CellIndex, shape: GridShape) -> Result<CellBox> {
    shape.check(idx)?;
    Ok(CellBox {
        den: shape.k as u64,
        lo: idx.0.iter().map(|&c| c as u64 - 1).collect(),
        hi: idx.0.iter().map(|&c| c as u64).collect(),
    })
}

/// Dimension of the shared face of two cells, `-1` when they are disjoint.
pub fn intersection_dim(a: &CellIndex, b: &CellIndex, shape: GridShape) -> Result<i32> {
    shape.check(a)?;
    shape.check(b)?;
    Ok(index_intersection_dim(&a.0, &b.0))
}

pub(crate) fn index_intersection_dim(a: &[u32], b: &[u32]) -> i32 {
    let mut equal = 0;
    for (x, y) in a.iter().zip(b) {
        match x.abs_diff(*y) {
            0 => equal += 1,
            1 => {}
            _ => return -1,
        }
    }
    equal
}

/// Linear-id offsets to the "forward" neighbours whose shared face has
/// dimension at least `min_dim`. Each unordered adjacent pair is produced
/// exactly once by pairing a cell with its forward neighbours.
pub(crate) struct Neighbourhood {
    deltas: Vec<isize>,
    // axes where the offset is -1 / +1, as bit masks
    need_low: Vec<u64>,
    need_high: Vec<u64>,
}

impl Neighbourhood {
    pub fn forward(shape: GridShape, min_dim: i32) -> Self {
        assert!(shape.n <= 64);
        let strides = shape.strides();
        let offsets: Vec<Vec<i64>> = offsets_within(shape.n, 1)
            .into_iter()
            .filter(|o| {
                let zeros = o.iter().filter(|&&c| c == 0).count() as i32;
                let first = o.iter().find(|&&c| c != 0).copied().unwrap_or(0);
                zeros >= min_dim && first > 0
            })
            .collect();
        let mask = |o: &Vec<i64>, v: i64| {
            o.iter()
                .enumerate()
                .filter(|(_, &c)| c == v)
                .map(|(s, _)| 1u64 << s)
                .sum()
        };
        Neighbourhood {
            deltas: offsets
                .iter()
                .map(|o| {
                    o.iter()
                        .zip(&strides)
                        .map(|(c, s)| *c as isize * *s as isize)
                        .sum()
                })
                .collect(),
            need_low: offsets.iter().map(|o| mask(o, -1)).collect(),
            need_high: offsets.iter().map(|o| mask(o, 1)).collect(),
        }
    }

    /// Calls `f(a, b)` once per unordered adjacent pair, with `a < b`.
    pub fn for_each_pair(&self, shape: GridShape, mut f: impl FnMut(usize, usize)) {
        let n = shape.n;
        let mut c = vec![0usize; n];
        // bit s set when coordinate s sits on the lower / upper boundary
        let mut at_low: u64 = (1u64 << n) - 1;
        let mut at_high: u64 = if shape.k == 1 { at_low } else { 0 };
        for a in 0..shape.cell_count() {
            if a > 0 {
                // odometer increment of the zero-based coordinates
                let mut s = n;
                while s > 0 {
                    s -= 1;
                    c[s] += 1;
                    if c[s] < shape.k {
                        at_low &= !(1 << s);
                        if c[s] + 1 == shape.k {
                            at_high |= 1 << s;
                        }
                        break;
                    }
                    c[s] = 0;
                    at_low |= 1 << s;
                    at_high &= !(1 << s);
                    if shape.k == 1 {
                        at_high |= 1 << s;
                    }
                }
            }
            for ((d, lo), hi) in self.deltas.iter().zip(&self.need_low).zip(&self.need_high) {
                if at_low & lo == 0 && at_high & hi == 0 {
                    f(a, (a as isize + d) as usize);
                }
            }
        }
    }
}

/// Maximal components of `cells` under "intersection dimension at least
/// `min_dim`". Components and their members are in lexicographic order.
pub fn components_min_dim(
    cells: &[CellIndex],
    min_dim: i32,
    shape: GridShape,
) -> Result<Vec<Vec<CellIndex>>> {
    let mut sorted: Vec<CellIndex> = cells.to_vec();
    for c in &sorted {
        shape.check(c)?;
    }
    sorted.sort();
    sorted.dedup();
    let pos: HashMap<usize, usize> = sorted
        .iter()
        .enumerate()
        .map(|(i, c)| (shape.linear(c), i))
        .collect();
    let mut uf = UnionFind::new(sorted.len());
    let offsets: Vec<Vec<i64>> = offsets_within(shape.n, 1)
        .into_iter()
        .filter(|o| o.iter().filter(|&&c| c == 0).count() as i32 >= min_dim)
        .collect();
    for (i, c) in sorted.iter().enumerate() {
        'offs: for o in &offsets {
            let mut nb = Vec::with_capacity(shape.n);
            for (ci, oi) in c.0.iter().zip(o) {
                let x = *ci as i64 + oi;
                if x < 1 || x > shape.k as i64 {
                    continue 'offs;
                }
                nb.push(x as u32);
            }
            if let Some(&j) = pos.get(&shape.linear(&CellIndex(nb))) {
                uf.union(i, j);
            }
        }
    }
    Ok(uf
        .groups()
        .into_iter()
        .map(|g| g.into_iter().map(|i| sorted[i].clone()).collect())
        .collect())
}

/// Axes (1-based) whose opposite faces the union of `cells` connects. Empty
/// unless the cells form a single connected family.
pub fn crossing_axes(cells: &[CellIndex], shape: GridShape) -> Result<Vec<usize>> {
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    if components_min_dim(cells, 0, shape)?.len() != 1 {
        return Ok(Vec::new());
    }
    Ok(touched_axes(cells.iter().map(|c| c.0.as_slice()), shape))
}

/// Axes on which some cell has coordinate 1 and some cell has coordinate `k`.
pub(crate) fn touched_axes<'a>(
    cells: impl Iterator<Item = &'a [u32]>,
    shape: GridShape,
) -> Vec<usize> {
    let mut lo = vec![false; shape.n];
    let mut hi = vec![false; shape.n];
    for c in cells {
        for s in 0..shape.n {
            lo[s] |= c[s] == 1;
            hi[s] |= c[s] as usize == shape.k;
        }
    }
    (0..shape.n)
        .filter(|&s| lo[s] && hi[s])
        .map(|s| s + 1)
        .collect()
}

/// A total map from cells to lattice values of a fixed dimension, stored
/// densely in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellLabeling {
    shape: GridShape,
    dim: usize,
    values: Vec<i64>,
}

impl CellLabeling {
    pub fn new(shape: GridShape, dim: usize, values: Vec<i64>) -> Result<Self> {
        let expected = shape.cell_count() * dim;
        if values.len() != expected {
            return Err(Error::invalid(format!(
                "labeling of {} cells with {dim}-dimensional values needs {expected} entries, got {}",
                shape.cell_count(),
                values.len()
            )));
        }
        Ok(CellLabeling { shape, dim, values })
    }

    pub fn from_fn(
        shape: GridShape,
        dim: usize,
        mut f: impl FnMut(&CellIndex) -> Vec<i64>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(shape.cell_count() * dim);
        for c in shape.cells() {
            let v = f(&c);
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            values.extend(v);
        }
        CellLabeling::new(shape, dim, values)
    }

    /// A coloring: one-dimensional values.
    pub fn from_colors(shape: GridShape, colors: Vec<i64>) -> Result<Self> {
        CellLabeling::new(shape, 1, colors)
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn raw(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, linear: usize) -> &[i64] {
        &self.values[linear * self.dim..(linear + 1) * self.dim]
    }

    pub fn value_at(&self, idx: &CellIndex) -> &[i64] {
        self.value(self.shape.linear(idx))
    }

    /// Adds `delta` to every value.
    pub fn translated(&self, delta: &[i64]) -> CellLabeling {
        assert_eq!(delta.len(), self.dim);
        let mut values = self.values.clone();
        for chunk in values.chunks_mut(self.dim.max(1)) {
            for (x, d) in chunk.iter_mut().zip(delta) {
                *x += d;
            }
        }
        CellLabeling { values, ..*self }
    }
}

/// A connected family of equally labeled cells.
#[derive(Clone, Debug)]
pub(crate) struct Component {
    /// Linear ids, ascending.
    pub cells: Vec<usize>,
    /// Axes (1-based) whose opposite faces the family touches.
    pub axes: Vec<usize>,
}

/// Components of every level set of `labeling` under corner adjacency,
/// ordered by smallest member.
pub(crate) fn level_components(labeling: &CellLabeling) -> Vec<Component> {
    let shape = labeling.shape();
    let mut uf = UnionFind::new(shape.cell_count());
    Neighbourhood::forward(shape, 0).for_each_pair(shape, |a, b| {
        if labeling.value(a) == labeling.value(b) {
            uf.union(a, b);
        }
    });
    let mut c0 = vec![0usize; shape.n];
    uf.groups()
        .into_iter()
        .map(|cells| {
            let mut lo = vec![false; shape.n];
            let mut hi = vec![false; shape.n];
            for &l in &cells {
                shape.coords0(l, &mut c0);
                for s in 0..shape.n {
                    lo[s] |= c0[s] == 0;
                    hi[s] |= c0[s] + 1 == shape.k;
                }
            }
            let axes = (0..shape.n)
                .filter(|&s| lo[s] && hi[s])
                .map(|s| s + 1)
                .collect();
            Component { cells, axes }
        })
        .collect()
}
