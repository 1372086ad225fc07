//! Small-scale computational evidence about the least size of the value set
//! in the discrete theorem: exhaustive singleton checks for `n = 2` and an
//! explicit `n = 3` labeling on which no single value suffices.
//!
//! Results here are evidence at the tested scale, not proofs.

use std::collections::VecDeque;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::coloring::{color, ColoringParams};
use crate::error::{Error, Result};
use crate::grid::{index_intersection_dim, CellIndex, CellLabeling, GridShape};
use crate::lattice::{is_one_connected, LatticePoint, LatticeSet};
use crate::steinhaus::{first_level_crossing, LevelCrossing};

/// Environment variable holding the number of enumeration workers.
pub const WORKERS_ENV: &str = "LEVELCROSS_WORKERS";

/// Default cap on the projected number of labelings.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// A single value whose level set has a component connecting opposite
/// faces. Values are tried lexicographically, then axes.
pub fn singleton_sufficient(labeling: &CellLabeling) -> Option<LevelCrossing> {
    first_level_crossing(labeling)
}

/// Breadth-first flood fill of each level set with pairwise adjacency
/// tests; deliberately shares nothing with the union-find search.
pub fn naive_singleton_exists(labeling: &CellLabeling) -> bool {
    let shape = labeling.shape();
    let total = shape.cell_count();
    let cells: Vec<CellIndex> = shape.cells().collect();
    let k = shape.k() as u32;
    let mut seen = vec![false; total];
    for start in 0..total {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut low = vec![false; shape.n()];
        let mut high = vec![false; shape.n()];
        while let Some(a) = queue.pop_front() {
            for s in 0..shape.n() {
                low[s] |= cells[a].0[s] == 1;
                high[s] |= cells[a].0[s] == k;
            }
            for b in 0..total {
                if !seen[b]
                    && labeling.value(a) == labeling.value(b)
                    && index_intersection_dim(&cells[a].0, &cells[b].0) >= 0
                {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        if low.iter().zip(&high).any(|(l, h)| *l && *h) {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustiveReport {
    pub k: usize,
    pub m: usize,
    pub radius: i64,
    /// Valid labelings visited.
    pub enumerated: u64,
    /// Labelings where both testers found a singleton crossing.
    pub verified: u64,
    /// First labeling (row-major values) on which either tester failed.
    pub counterexample: Option<Vec<i64>>,
    pub elapsed_ms: f64,
}

impl ExhaustiveReport {
    pub fn all_verified(&self) -> bool {
        self.counterexample.is_none() && self.verified == self.enumerated
    }
}

/// `(2r+1)^(k^2 - 1)` labelings before pruning.
pub fn projected_count(k: usize, radius: i64) -> u128 {
    let base = (2 * radius + 1) as u128;
    let mut total: u128 = 1;
    for _ in 1..k * k {
        total = total.saturating_mul(base);
    }
    total
}

/// Enumerates every `F: [k]^2 -> [-radius, radius]` with `F(1,1) = 0` that
/// satisfies the adjacency condition at `m`, and checks that each admits a
/// single-value crossing. Cells are filled in row-major order and a partial
/// labeling is abandoned as soon as it violates the condition.
pub fn exhaustive_singleton_check(
    k: usize,
    m: usize,
    radius: i64,
    budget: u128,
) -> Result<ExhaustiveReport> {
    if m > 1 {
        return Err(Error::invalid(format!(
            "m must be 0 or 1 for n = 2, got {m}"
        )));
    }
    if radius < 0 {
        return Err(Error::invalid("radius must be nonnegative"));
    }
    let shape = GridShape::new(2, k)?;
    let projected = projected_count(k, radius);
    if projected > budget {
        return Err(Error::InfeasibleEnumeration { projected, budget });
    }
    let start = Instant::now();
    let total = shape.cell_count();
    let cells: Vec<CellIndex> = shape.cells().collect();
    let back: Vec<Vec<usize>> = (0..total)
        .map(|a| {
            (0..a)
                .filter(|&b| index_intersection_dim(&cells[a].0, &cells[b].0) >= m as i32)
                .collect()
        })
        .collect();

    let run = || -> (u64, u64, Option<Vec<i64>>) {
        let firsts: Vec<i64> = if total > 1 {
            (-radius..=radius).collect()
        } else {
            vec![0]
        };
        firsts
            .into_par_iter()
            .map(|second| {
                let mut values = vec![0i64; total];
                let mut acc = (0u64, 0u64, None);
                if total == 1 {
                    leaf(shape, &values, &mut acc);
                    return acc;
                }
                if (second).abs() > 1 && back[1].contains(&0) {
                    return acc;
                }
                values[1] = second;
                dfs(shape, &back, radius, 2, &mut values, &mut acc);
                acc
            })
            .reduce(|| (0, 0, None), |a, b| (a.0 + b.0, a.1 + b.1, a.2.or(b.2)))
    };
    let (enumerated, verified, counterexample) = match worker_count() {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {w} workers: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(ExhaustiveReport {
        k,
        m,
        radius,
        enumerated,
        verified,
        counterexample,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&w| w > 0)
}

fn dfs(
    shape: GridShape,
    back: &[Vec<usize>],
    radius: i64,
    pos: usize,
    values: &mut Vec<i64>,
    acc: &mut (u64, u64, Option<Vec<i64>>),
) {
    if pos == values.len() {
        leaf(shape, values, acc);
        return;
    }
    let (mut lo, mut hi) = (-radius, radius);
    for &b in &back[pos] {
        lo = lo.max(values[b] - 1);
        hi = hi.min(values[b] + 1);
    }
    for v in lo..=hi {
        values[pos] = v;
        dfs(shape, back, radius, pos + 1, values, acc);
    }
}

fn leaf(shape: GridShape, values: &[i64], acc: &mut (u64, u64, Option<Vec<i64>>)) {
    let l = CellLabeling::new(shape, 1, values.to_vec()).expect("sizes match");
    acc.0 += 1;
    if singleton_sufficient(&l).is_some() && naive_singleton_exists(&l) {
        acc.1 += 1;
    } else if acc.2.is_none() {
        acc.2 = Some(values.to_vec());
    }
}

/// `g(c)`: the two binary digits of `c - 1`, high digit first.
pub fn binary_digits(c: usize) -> [i64; 2] {
    let v = c as i64 - 1;
    [(v >> 1) & 1, v & 1]
}

/// The `[7]^3` labeling `F(i) = g(f(i))`, with `f` the 4-coloring of `Z^3`
/// at distance 1 evaluated at the cell index itself and `g` from
/// [`binary_digits`]. Its monochromatic components have at most 6 cells, so
/// no single value crosses, while any two values in `{0,1}^2` are within
/// l∞ distance 1.
pub fn build_pair_witness() -> CellLabeling {
    let params = ColoringParams::new(3, 1).expect("valid parameters");
    let side = params.cluster_size() as usize + 1;
    let shape = GridShape::new(3, side).expect("valid shape");
    CellLabeling::from_fn(shape, 2, |cell| {
        let t = LatticePoint(cell.0.iter().map(|&i| i as i64).collect());
        binary_digits(color(&t, params).expect("dimension 3")).to_vec()
    })
    .expect("dimension 2 values")
}

/// Smallest 1-connected set of occurring values (up to `max_size` points)
/// whose preimage has a component connecting opposite faces. Exhaustive
/// over subsets, so only usable with few distinct values.
pub fn smallest_value_set(
    labeling: &CellLabeling,
    max_size: usize,
) -> Option<(LatticeSet, LevelCrossing)> {
    let mut distinct: Vec<Vec<i64>> = (0..labeling.shape().cell_count())
        .map(|l| labeling.value(l).to_vec())
        .collect();
    distinct.sort();
    distinct.dedup();
    let d = labeling.dim();
    for size in 1..=max_size.min(distinct.len()) {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let set =
                LatticeSet::from_points(d, pick.iter().map(|&i| LatticePoint(distinct[i].clone())))
                    .expect("uniform dimension");
            if is_one_connected(&set) {
                // relabel: 1 inside the set, 0 outside, and look for a crossing of 1
                let marks: Vec<i64> = (0..labeling.shape().cell_count())
                    .map(|l| set.contains(&LatticePoint(labeling.value(l).to_vec())) as i64)
                    .collect();
                let marked = CellLabeling::new(labeling.shape(), 1, marks).expect("sizes match");
                if let Some(c) = crate::steinhaus::first_level_crossing_on_value(&marked, &[1]) {
                    return Some((set, c));
                }
            }
            if !next_combination(&mut pick, distinct.len()) {
                break;
            }
        }
    }
    None
}

/// Advances `pick` to the next increasing `pick.len()`-subset of `0..n`.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let size = pick.len();
    for i in (0..size).rev() {
        if pick[i] < n - size + i {
            pick[i] += 1;
            for j in i + 1..size {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
