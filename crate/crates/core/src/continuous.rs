//! Approximate level sets of Lipschitz maps `f: I^n -> R^{n-1}`.
//!
//! The pipeline rescales `f` into the unit cube, samples it on a fine cube
//! grid, labels every fine cell by the coarse value cube its center lands
//! in, and hands that labeling to [`crate::discrete::solve`]. The result
//! is a point `p` and a connected family of fine cells, crossing one pair
//! of opposite faces, on which `f` stays within `epsilon` of `p`.
//!
//! The fine grid is sized from a declared Lipschitz constant: with
//! `L0 / m_grid <= 1/(4k)` the image of every fine cell stays inside the
//! `1/(4k)`-enlargement of the value cube assigned to it, which is what
//! makes touching cells receive adjacent value cubes.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::discrete::{solve, SolveOptions};
use crate::error::{Error, Result};
use crate::grid::{CellIndex, CellLabeling, GridShape};
use crate::steinhaus::{find_crossing, verify_chessboard, ChessboardWitness};

/// Fine grids above this many cells are refused.
pub const MAX_FINE_CELLS: usize = 40_000_000;

pub type EvalFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// A map `I^n -> R^{n-1}` with a declared l∞ Lipschitz constant and an
/// output bound. The evaluator must be pure; it is called from several
/// threads at once.
#[derive(Clone)]
pub struct ContinuousFn {
    name: String,
    n: usize,
    lipschitz: f64,
    bound: f64,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for ContinuousFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousFn")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("lipschitz", &self.lipschitz)
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

impl ContinuousFn {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        lipschitz: f64,
        bound: f64,
        eval: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::invalid(format!(
                "Lipschitz constant must be positive, got {lipschitz}"
            )));
        }
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::invalid(format!(
                "output bound must be positive, got {bound}"
            )));
        }
        Ok(ContinuousFn {
            name: name.into(),
            n,
            lipschitz,
            bound,
            eval: Arc::new(eval),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn out_dim(&self) -> usize {
        self.n - 1
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n - 1);
        (self.eval)(x, out)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n - 1];
        self.eval_into(x, &mut out);
        out
    }
}

/// `f0 = f / (2M) + 1/2` together with the inverse map for witnesses.
#[derive(Clone, Debug)]
pub struct Rescaled {
    pub f0: ContinuousFn,
    /// `2M`.
    pub scale: f64,
}

impl Rescaled {
    pub fn point_back(&self, p0: &[f64]) -> Vec<f64> {
        p0.iter().map(|&v| self.scale * (v - 0.5)).collect()
    }

    pub fn epsilon_back(&self, eps0: f64) -> f64 {
        self.scale * eps0
    }

    pub fn epsilon_forward(&self, eps: f64) -> f64 {
        eps / self.scale
    }
}

pub fn rescale(f: &ContinuousFn) -> Rescaled {
    let scale = 2.0 * f.bound;
    let inner = f.clone();
    let f0 = ContinuousFn {
        name: format!("{}/rescaled", f.name),
        n: f.n,
        lipschitz: f.lipschitz / scale,
        bound: 1.0,
        eval: Arc::new(move |x: &[f64], out: &mut [f64]| {
            inner.eval_into(x, out);
            for v in out.iter_mut() {
                *v = *v / scale + 0.5;
            }
        }),
    };
    Rescaled { f0, scale }
}

/// Size bound on the value set used to size the value grid: 1 for `n = 2`,
/// 2 for `n = 3` and `(n-1)!` beyond.
pub fn resolution_constant(n: usize) -> f64 {
    match n {
        0..=2 => 1.0,
        3 => 2.0,
        _ => (1..n).map(|i| i as f64).product(),
    }
}

/// Smallest `k` with `3 sqrt(n-1) C / (2k) < eps0`.
pub fn choose_resolution(n: usize, eps0: f64) -> Result<usize> {
    if !(eps0.is_finite() && eps0 > 0.0) {
        return Err(Error::invalid(format!(
            "epsilon must be positive, got {eps0}"
        )));
    }
    if n <= 1 {
        return Ok(1);
    }
    let num = 3.0 * ((n - 1) as f64).sqrt() * resolution_constant(n);
    let ok = |k: usize| num / (2.0 * k as f64) < eps0;
    let guess = (num / (2.0 * eps0)).floor();
    if guess > 1e9 {
        return Err(Error::invalid(format!(
            "epsilon {eps0} needs an impractically fine value grid"
        )));
    }
    let mut k = (guess as usize).saturating_sub(2).max(1);
    while !ok(k) {
        k += 1;
    }
    Ok(k)
}

/// Smallest fine subdivision with `l0 / m_grid <= 1/(4k)`.
pub fn grid_size(l0: f64, k: usize) -> usize {
    ((4.0 * k as f64 * l0).ceil() as usize).max(1)
}

/// 1-based index of the `k`-subdivision interval containing `y` after
/// clamping into `[0, 1]`.
pub(crate) fn value_cube(y: f64, k: usize) -> i64 {
    let y = if y.is_nan() { 0.0 } else { y.clamp(0.0, 1.0) };
    ((y * k as f64).floor() as i64 + 1).min(k as i64)
}

pub fn discretize(f0: &ContinuousFn, k: usize) -> Result<CellLabeling> {
    discretize_on(f0, k, grid_size(f0.lipschitz(), k))
}

/// Labels the cells of `K_{m_grid}^n` by the value cube of `K_k^{n-1}`
/// containing the clamped image of the cell center.
pub fn discretize_on(f0: &ContinuousFn, k: usize, m_grid: usize) -> Result<CellLabeling> {
    if k == 0 {
        return Err(Error::invalid("value resolution must be positive"));
    }
    if (m_grid as f64) < 4.0 * k as f64 * f0.lipschitz() {
        return Err(Error::invalid(format!(
            "fine grid {m_grid} is too coarse for Lipschitz constant {} at resolution {k}",
            f0.lipschitz()
        )));
    }
    let n = f0.n();
    let shape = fine_shape(n, m_grid)?;
    let d = n - 1;
    let mut values = vec![0i64; shape.cell_count() * d.max(1)];
    if d == 0 {
        return CellLabeling::new(shape, 0, Vec::new());
    }
    let h = 1.0 / m_grid as f64;
    values.par_chunks_mut(d).enumerate().for_each_init(
        || (vec![0usize; n], vec![0f64; n], vec![0f64; d]),
        |(c0, x, y), (l, out)| {
            shape.coords0(l, c0);
            for s in 0..n {
                x[s] = (c0[s] as f64 + 0.5) * h;
            }
            f0.eval_into(x, y);
            for s in 0..d {
                out[s] = value_cube(y[s], k);
            }
        },
    );
    CellLabeling::new(shape, d, values)
}

fn fine_shape(n: usize, m_grid: usize) -> Result<GridShape> {
    let cells = (m_grid as f64).powi(n as i32);
    if cells > MAX_FINE_CELLS as f64 {
        return Err(Error::invalid(format!(
            "fine grid [{m_grid}]^{n} exceeds {MAX_FINE_CELLS} cells; use a larger epsilon"
        )));
    }
    GridShape::new(n, m_grid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuousWitness {
    pub p: Vec<f64>,
    /// Lexicographically sorted cells of `shape`.
    pub cells: Vec<CellIndex>,
    pub shape: GridShape,
    /// 1-based.
    pub axis: usize,
    pub epsilon: f64,
    /// Subdivisions of the value cube used by the discrete step.
    pub value_resolution: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LevelOptions {
    pub prefer_axis: Option<usize>,
    /// Round the fine grid up to a multiple of this (0 or 1 for none).
    pub grid_multiple: usize,
}

/// A rescaled function with its value resolution and discrete labeling,
/// ready to be solved (possibly more than once).
#[derive(Clone, Debug)]
pub struct Prepared {
    pub rescaled: Rescaled,
    pub epsilon: f64,
    pub value_resolution: usize,
    pub labeling: CellLabeling,
}

pub fn prepare(f: &ContinuousFn, epsilon: f64, grid_multiple: usize) -> Result<Prepared> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let rescaled = rescale(f);
    let k = choose_resolution(f.n(), rescaled.epsilon_forward(epsilon))?;
    let mut m_grid = if f.n() == 1 {
        1
    } else {
        grid_size(rescaled.f0.lipschitz(), k)
    };
    if grid_multiple > 1 {
        m_grid = m_grid.div_ceil(grid_multiple) * grid_multiple;
    }
    let labeling = discretize_on(&rescaled.f0, k, m_grid)?;
    Ok(Prepared {
        rescaled,
        epsilon,
        value_resolution: k,
        labeling,
    })
}

pub fn solve_prepared(prep: &Prepared, prefer_axis: Option<usize>) -> Result<ContinuousWitness> {
    let k = prep.value_resolution;
    let w = solve(
        &prep.labeling,
        0,
        SolveOptions {
            shrink: false,
            prefer_axis,
        },
    )?;
    let p_hat =
        w.p.first()
            .ok_or_else(|| Error::TheoremViolation("empty value set".into()))?;
    let p0: Vec<f64> = p_hat
        .coords()
        .iter()
        .map(|&c| (c as f64 - 0.5) / k as f64)
        .collect();
    Ok(ContinuousWitness {
        p: prep.rescaled.point_back(&p0),
        cells: w.cells,
        shape: prep.labeling.shape(),
        axis: w.axis,
        epsilon: prep.epsilon,
        value_resolution: k,
    })
}

pub fn approximate_level_crossing(f: &ContinuousFn, epsilon: f64) -> Result<ContinuousWitness> {
    approximate_level_crossing_with(f, epsilon, LevelOptions::default())
}

pub fn approximate_level_crossing_with(
    f: &ContinuousFn,
    epsilon: f64,
    opts: LevelOptions,
) -> Result<ContinuousWitness> {
    solve_prepared(&prepare(f, epsilon, opts.grid_multiple)?, opts.prefer_axis)
}

/// Upper bound on `sup ‖f(x) - p‖₂` over the witness cells: the largest
/// sampled distance plus a Lipschitz term covering the unsampled points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub sampled_max: f64,
    pub slack: f64,
    pub samples: usize,
}

impl Certificate {
    pub fn bound(&self) -> f64 {
        self.sampled_max + self.slack
    }
}

/// Samples each witness cell on its `3^n` half-step points (corners, face
/// and edge midpoints, center). Every point of a cell is within `h/4` in
/// l∞ of a sample; the slack uses the coarser `L h / 2` per output
/// coordinate, times `sqrt(n-1)` for the Euclidean norm.
pub fn certify(f: &ContinuousFn, w: &ContinuousWitness) -> Result<Certificate> {
    certify_with(f, w, 3)
}

/// Center-only variant: one evaluation per cell, slack `sqrt(n-1) L h / 2`.
pub fn certify_centers(f: &ContinuousFn, w: &ContinuousWitness) -> Result<Certificate> {
    certify_with(f, w, 1)
}

fn certify_with(f: &ContinuousFn, w: &ContinuousWitness, per_axis: usize) -> Result<Certificate> {
    let n = f.n();
    if w.shape.n() != n || w.p.len() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: w.shape.n(),
        });
    }
    let h = 1.0 / w.shape.k() as f64;
    let per_cell = per_axis.pow(n as u32);
    let sampled_max = w
        .cells
        .par_iter()
        .map_init(
            || (vec![0f64; n], vec![0f64; n - 1]),
            |(x, y), cell| {
                let mut worst = 0f64;
                for t in 0..per_cell {
                    let mut t = t;
                    for (xs, &c) in x.iter_mut().zip(&cell.0) {
                        let step = if per_axis == 1 { 1 } else { t % per_axis };
                        t /= per_axis.max(1);
                        // offsets 0, 1/2, 1 of the cell side (center only: 1/2)
                        *xs = (c as f64 - 1.0 + step as f64 * 0.5) * h;
                    }
                    f.eval_into(x, y);
                    let d2: f64 = y.iter().zip(&w.p).map(|(a, b)| (a - b) * (a - b)).sum();
                    worst = worst.max(d2.sqrt());
                }
                worst
            },
        )
        .reduce(|| 0.0, f64::max);
    let slack = ((n - 1) as f64).sqrt() * f.lipschitz() * h / 2.0;
    Ok(Certificate {
        sampled_max,
        slack,
        samples: per_cell * w.cells.len(),
    })
}

pub fn hausdorff_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("point set"));
    }
    let d = a[0].len();
    for p in a.iter().chain(b) {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// `max_{x in a} min_{y in b} |x - y|`, pruning candidates by their
/// distance along the first coordinate.
fn directed_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a[0].is_empty() {
        return 0.0;
    }
    let mut sorted: Vec<&Vec<f64>> = b.iter().collect();
    sorted.sort_by(|p, q| p[0].total_cmp(&q[0]));
    a.par_iter()
        .map(|x| {
            let dist = |y: &Vec<f64>| x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
            let start = sorted.partition_point(|y| y[0] < x[0]);
            let mut best = f64::INFINITY;
            for y in &sorted[start..] {
                if (y[0] - x[0]).powi(2) >= best {
                    break;
                }
                best = best.min(dist(y));
            }
            for y in sorted[..start].iter().rev() {
                if (y[0] - x[0]).powi(2) >= best {
                    break;
                }
                best = best.min(dist(y));
            }
            best.sqrt()
        })
        .reduce(|| 0.0, f64::max)
}

/// The distinct cell corners of the witness, in `I^n` coordinates.
pub fn cell_union_samples(w: &ContinuousWitness) -> Vec<Vec<f64>> {
    let n = w.shape.n();
    let h = 1.0 / w.shape.k() as f64;
    let mut corners: BTreeSet<Vec<u32>> = BTreeSet::new();
    for cell in &w.cells {
        for t in 0..1usize << n {
            corners.insert(
                (0..n)
                    .map(|s| cell.0[s] - 1 + ((t >> s) & 1) as u32)
                    .collect(),
            );
        }
    }
    corners
        .into_iter()
        .map(|c| c.into_iter().map(|v| v as f64 * h).collect())
        .collect()
}

/// Whether the closed cell unions of two witnesses share a point, decided
/// with integer arithmetic on the cell bounds.
pub fn unions_intersect(a: &ContinuousWitness, b: &ContinuousWitness) -> bool {
    let n = a.shape.n();
    if b.shape.n() != n {
        return false;
    }
    let (ma, mb) = (a.shape.k() as u64, b.shape.k() as u64);
    let set: HashSet<&[u32]> = b.cells.iter().map(|c| c.0.as_slice()).collect();
    let mut lo = vec![0u32; n];
    let mut hi = vec![0u32; n];
    let mut cur = vec![0u32; n];
    for cell in &a.cells {
        for s in 0..n {
            let i = cell.0[s] as u64;
            // b-cells j with (j-1)/mb <= i/ma and j/mb >= (i-1)/ma
            let j_hi = (i * mb / ma + 1).min(mb);
            let j_lo = ((i - 1) * mb).div_ceil(ma).max(1);
            lo[s] = j_lo as u32;
            hi[s] = j_hi as u32;
        }
        cur.copy_from_slice(&lo);
        loop {
            if set.contains(cur.as_slice()) {
                return true;
            }
            if !next_in_box(&mut cur, &lo, &hi) {
                break;
            }
        }
    }
    false
}

/// Advances `cur` through the box `lo..=hi` in row-major order; false once
/// the box is exhausted.
fn next_in_box(cur: &mut [u32], lo: &[u32], hi: &[u32]) -> bool {
    for s in (0..cur.len()).rev() {
        if cur[s] < hi[s] {
            cur[s] += 1;
            return true;
        }
        cur[s] = lo[s];
    }
    false
}

#[derive(Clone, Debug, Serialize)]
pub struct RefineStep {
    pub hausdorff: f64,
    pub drift: f64,
    /// `epsilon_j + epsilon_{j+1}`.
    pub drift_limit: f64,
    pub unions_intersect: bool,
}

impl RefineStep {
    /// The drift limit is only claimed when the unions intersect.
    pub fn consistent(&self) -> bool {
        !self.unions_intersect || self.drift <= self.drift_limit
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Refinement {
    pub axis: usize,
    pub witnesses: Vec<ContinuousWitness>,
    pub steps: Vec<RefineStep>,
}

/// Witnesses at `epsilon_start / 2^j` for `j < steps`. All witnesses are
/// re-solved to cross the most frequent axis of the first pass (ties go to
/// the smaller axis) when their discrete problem allows it.
pub fn refine_sequence(f: &ContinuousFn, epsilon_start: f64, steps: usize) -> Result<Refinement> {
    if steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    let mut prepared = Vec::with_capacity(steps);
    let mut witnesses = Vec::with_capacity(steps);
    for j in 0..steps {
        let prep = prepare(f, epsilon_start / (1u64 << j) as f64, 1)?;
        witnesses.push(solve_prepared(&prep, None)?);
        prepared.push(prep);
    }
    let mut counts = vec![0usize; f.n() + 1];
    for w in &witnesses {
        counts[w.axis] += 1;
    }
    let axis = (1..=f.n())
        .max_by_key(|&a| (counts[a], std::cmp::Reverse(a)))
        .unwrap_or(1);
    for (w, prep) in witnesses.iter_mut().zip(&prepared) {
        if w.axis != axis {
            *w = solve_prepared(prep, Some(axis))?;
        }
    }
    drop(prepared);

    let samples: Vec<Vec<Vec<f64>>> = witnesses.iter().map(cell_union_samples).collect();
    let mut diag = Vec::with_capacity(steps.saturating_sub(1));
    for j in 0..steps.saturating_sub(1) {
        let (a, b) = (&witnesses[j], &witnesses[j + 1]);
        let drift =
            a.p.iter()
                .zip(&b.p)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt();
        diag.push(RefineStep {
            hausdorff: hausdorff_distance(&samples[j], &samples[j + 1])?,
            drift,
            drift_limit: a.epsilon + b.epsilon,
            unions_intersect: unions_intersect(a, b),
        });
    }
    Ok(Refinement {
        axis,
        witnesses,
        steps: diag,
    })
}

/// The map `x -> (f_1(x), ..., f_{n-1}(x))` with `f_i` the l∞ distance to the
/// union of color-`i` cells, clamped at `1/k`. The clamp leaves the zero
/// sets unchanged and lets each evaluation look only at the `3^n` cells
/// around `x`.
pub fn distance_fields(coloring: &CellLabeling) -> Result<ContinuousFn> {
    let shape = coloring.shape();
    let n = shape.n();
    if n > 16 {
        return Err(Error::UnsupportedDimension(n));
    }
    let k = shape.k();
    let colors: Arc<Vec<i64>> = Arc::new(coloring.raw().to_vec());
    let strides = shape.strides();
    let cap = 1.0 / k as f64;
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|mut t| {
            (0..n)
                .map(|_| {
                    let o = (t % 3) as i64 - 1;
                    t /= 3;
                    o
                })
                .collect()
        })
        .collect();
    ContinuousFn::new(
        format!("distance-fields-{n}x{k}"),
        n,
        1.0,
        cap,
        move |x, out| {
            out.iter_mut().for_each(|v| *v = cap);
            let kf = k as f64;
            let mut base = [0i64; 16];
            for s in 0..n {
                base[s] = ((x[s] * kf).floor() as i64).clamp(0, k as i64 - 1);
            }
            'cells: for off in &offsets {
                let mut lin = 0usize;
                let mut gap = 0f64;
                for s in 0..n {
                    let c = base[s] + off[s];
                    if c < 0 || c >= k as i64 {
                        continue 'cells;
                    }
                    lin += c as usize * strides[s];
                    let (lo, hi) = (c as f64 / kf, (c + 1) as f64 / kf);
                    gap = gap.max(lo - x[s]).max(x[s] - hi);
                }
                let color = colors[lin];
                if color >= 1 && (color as usize) < n {
                    let slot = &mut out[color as usize - 1];
                    *slot = slot.min(gap.max(0.0));
                }
            }
        },
    )
}

/// Epsilons tried by [`chessboard_via_distance_fields`], as multiples of
/// the cell side `1/k`. The last one is small enough for the mapping to be
/// guaranteed; the larger ones are cheaper and usually suffice.
pub const FIELD_EPSILONS: [f64; 3] = [0.9, 0.45, 0.22];

#[derive(Clone, Debug)]
pub struct FieldCrossing {
    pub witness: ChessboardWitness,
    /// The level crossing the witness was read off.
    pub level: ContinuousWitness,
    /// Position in [`FIELD_EPSILONS`] of the epsilon that succeeded.
    pub attempt: usize,
}

/// Recovers a monochromatic crossing of an `n`-coloring from an
/// approximate level crossing of its distance fields, then checks it with
/// the independent verifier.
pub fn chessboard_via_distance_fields(coloring: &CellLabeling) -> Result<ChessboardWitness> {
    Ok(field_crossing(coloring)?.witness)
}

pub fn field_crossing(coloring: &CellLabeling) -> Result<FieldCrossing> {
    let shape = coloring.shape();
    let n = shape.n();
    // validates the coloring and confirms a crossing exists
    let direct = find_crossing(coloring)?;
    let f = distance_fields(coloring)?;
    if n == 1 {
        let level = approximate_level_crossing(&f, 1.0)?;
        return Ok(FieldCrossing {
            witness: direct,
            level,
            attempt: 0,
        });
    }
    let k = shape.k();
    let mut last = String::new();
    for (attempt, factor) in FIELD_EPSILONS.into_iter().enumerate() {
        let eps = factor / k as f64;
        let level = approximate_level_crossing_with(
            &f,
            eps,
            LevelOptions {
                prefer_axis: None,
                grid_multiple: k,
            },
        )?;
        let r = certify_centers(&f, &level)?.bound();
        for candidate in map_to_classes(coloring, &level, r) {
            match verify_chessboard(coloring, &candidate) {
                Ok(()) => {
                    return Ok(FieldCrossing {
                        witness: candidate,
                        level,
                        attempt,
                    })
                }
                Err(e) => last = e.to_string(),
            }
        }
        if last.is_empty() {
            last = format!("no color class matched the level crossing at epsilon {eps}");
        }
    }
    Err(Error::TheoremViolation(format!(
        "distance-field crossing could not be mapped to a color class: {last}"
    )))
}

/// Candidate chessboard witnesses suggested by a level crossing of the
/// distance fields, most plausible first.
fn map_to_classes(
    coloring: &CellLabeling,
    cw: &ContinuousWitness,
    r: f64,
) -> Vec<ChessboardWitness> {
    let shape = coloring.shape();
    let n = shape.n();
    let k = shape.k();
    let ratio = (cw.shape.k() / k) as u32;
    let parent = |c: &CellIndex| CellIndex(c.0.iter().map(|&i| (i - 1) / ratio + 1).collect());
    let mut out = Vec::new();

    let parents: BTreeSet<CellIndex> = cw.cells.iter().map(parent).collect();
    if parents.iter().all(|c| coloring.value_at(c)[0] == n as i64) {
        out.extend(grow_class(coloring, n as i64, &parents, cw.axis));
    }

    // colors j < n whose field value the witness pins near zero
    let mut js: Vec<(f64, usize)> =
        cw.p.iter()
            .enumerate()
            .filter(|(_, &v)| v.abs() < r.max(cw.epsilon))
            .map(|(j, &v)| (v.abs(), j + 1))
            .collect();
    js.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let m_grid = cw.shape.k() as i64;
    for (pj, j) in js {
        // class-j cells within l∞ distance pj + r of some witness cell
        let reach = pj + r;
        let mut near: BTreeSet<CellIndex> = BTreeSet::new();
        for cell in &cw.cells {
            let p = parent(cell);
            let mut t = 0usize;
            while t < 3usize.pow(n as u32) {
                let mut tt = t;
                let mut cand = Vec::with_capacity(n);
                let mut gap = 0i64;
                for s in 0..n {
                    let c = p.0[s] as i64 + (tt % 3) as i64 - 1;
                    tt /= 3;
                    if c < 1 || c > k as i64 {
                        gap = i64::MAX;
                        break;
                    }
                    // fine units: coarse cell c spans [(c-1) ratio, c ratio]
                    let (lo, hi) = ((c - 1) * ratio as i64, c * ratio as i64);
                    let (flo, fhi) = (cell.0[s] as i64 - 1, cell.0[s] as i64);
                    gap = gap.max(lo - fhi).max(flo - hi);
                    cand.push(c as u32);
                }
                t += 1;
                if gap == i64::MAX {
                    continue;
                }
                let cand = CellIndex(cand);
                if (gap.max(0) as f64) / (m_grid as f64) <= reach
                    && coloring.value_at(&cand)[0] == j as i64
                {
                    near.insert(cand);
                }
            }
        }
        if !near.is_empty() {
            out.extend(grow_class(coloring, j as i64, &near, cw.axis));
        }
    }
    out
}

/// The `color` components meeting `seeds`, those crossing `axis` first and
/// then those crossing any axis, each reported on its best axis.
fn grow_class(
    coloring: &CellLabeling,
    color: i64,
    seeds: &BTreeSet<CellIndex>,
    axis: usize,
) -> Vec<ChessboardWitness> {
    let shape = coloring.shape();
    let n = shape.n();
    let strides = shape.strides();
    let mut seen = vec![false; shape.cell_count()];
    let mut c0 = vec![0usize; n];
    let mut found = Vec::new();
    for seed in seeds {
        let start = shape.linear(seed);
        if seen[start] || coloring.value(start)[0] != color {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut cells = Vec::new();
        while let Some(l) = stack.pop() {
            cells.push(l);
            shape.coords0(l, &mut c0);
            'nb: for t in 0..3usize.pow(n as u32) {
                let mut tt = t;
                let mut lin = 0usize;
                for s in 0..n {
                    let c = c0[s] as i64 + (tt % 3) as i64 - 1;
                    tt /= 3;
                    if c < 0 || c >= shape.k() as i64 {
                        continue 'nb;
                    }
                    lin += c as usize * strides[s];
                }
                if !seen[lin] && coloring.value(lin)[0] == color {
                    seen[lin] = true;
                    stack.push(lin);
                }
            }
        }
        cells.sort_unstable();
        let cells: Vec<CellIndex> = cells.into_iter().map(|l| shape.index(l)).collect();
        let axes = crate::grid::crossing_axes(&cells, shape).unwrap_or_default();
        let (rank, best) = if axes.contains(&axis) {
            (0, axis)
        } else if let Some(&a) = axes.first() {
            (1, a)
        } else {
            (2, axis)
        };
        found.push((
            rank,
            ChessboardWitness {
                color,
                cells,
                axis: best,
            },
        ));
    }
    found.sort_by_key(|(rank, _)| *rank);
    found.into_iter().map(|(_, w)| w).collect()
}
