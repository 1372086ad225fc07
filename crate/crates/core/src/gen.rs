//! Seeded generators of labelings that satisfy the adjacency condition.
//!
//! Two families, used by tests and the verification suite:
//!
//! * [`polynomial_labeling`] floors a scaled random quadratic map sampled
//!   at cell centers. Scaling by `k / L` (with `L` an l∞ Lipschitz bound)
//!   keeps touching cells within 1 of each other, so the result is valid
//!   for every `m`.
//! * [`walk_labeling`] assigns values cell by cell in row-major order, each
//!   drawn uniformly from the values compatible with already placed
//!   neighbours that share a face of dimension `>= m`. A dead end restarts
//!   the whole labeling.

use rand::Rng;

use crate::grid::{index_intersection_dim, CellLabeling, GridShape};

/// Rejection restarts before [`walk_labeling`] gives up and falls back to
/// the polynomial family.
pub const MAX_WALK_RESTARTS: usize = 10_000;

pub fn polynomial_labeling(shape: GridShape, rng: &mut impl Rng) -> CellLabeling {
    let n = shape.n();
    let d = n - 1;
    let k = shape.k() as f64;
    // monomials of degree <= 2 as exponent vectors
    let mut monomials: Vec<Vec<u32>> = vec![vec![0; n]];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        monomials.push(e);
        for j in i..n {
            let mut e = vec![0; n];
            e[i] += 1;
            e[j] += 1;
            monomials.push(e);
        }
    }
    let mut polys = Vec::with_capacity(d);
    for _ in 0..d {
        let coeffs: Vec<f64> = monomials.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();
        let lip: f64 = coeffs
            .iter()
            .zip(&monomials)
            .map(|(c, e)| c.abs() * e.iter().sum::<u32>() as f64)
            .sum();
        let scale = rng.gen_range(0.2..0.99) * k / lip.max(1e-9);
        let shift = rng.gen_range(-5.0..5.0);
        polys.push((coeffs, scale, shift));
    }
    CellLabeling::from_fn(shape, d, |cell| {
        let x: Vec<f64> = cell.0.iter().map(|&i| (i as f64 - 0.5) / k).collect();
        polys
            .iter()
            .map(|(coeffs, scale, shift)| {
                let g: f64 = coeffs
                    .iter()
                    .zip(&monomials)
                    .map(|(c, e)| {
                        c * x
                            .iter()
                            .zip(e)
                            .map(|(xi, &p)| xi.powi(p as i32))
                            .product::<f64>()
                    })
                    .sum();
                (g * scale + shift).floor() as i64
            })
            .collect()
    })
    .expect("generated values have the declared dimension")
}

/// Returns `None` after `max_restarts` dead ends.
pub fn try_walk_labeling(
    shape: GridShape,
    m: usize,
    rng: &mut impl Rng,
    max_restarts: usize,
) -> Option<CellLabeling> {
    let n = shape.n();
    let d = n - 1;
    let total = shape.cell_count();
    let cells: Vec<Vec<u32>> = shape.cells().map(|c| c.0).collect();

    // earlier cells sharing a face of dimension >= m, per cell
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
    let strides = shape.strides();
    let back: Vec<Vec<usize>> = (0..total)
        .map(|a| {
            let mut out = Vec::new();
            for off in &offsets {
                let pos: Option<Vec<u32>> = cells[a]
                    .iter()
                    .zip(off)
                    .map(|(&c, &o)| {
                        let q = c as i64 + o;
                        (1..=shape.k() as i64).contains(&q).then_some(q as u32)
                    })
                    .collect();
                let Some(pos) = pos else { continue };
                let b: usize = pos
                    .iter()
                    .zip(&strides)
                    .map(|(&q, s)| (q as usize - 1) * s)
                    .sum();
                if b < a && index_intersection_dim(&cells[a], &cells[b]) >= m as i32 {
                    out.push(b);
                }
            }
            out
        })
        .collect();

    let mut values = vec![0i64; total * d];
    'attempt: for _ in 0..=max_restarts {
        for a in 0..total {
            for s in 0..d {
                let (mut lo, mut hi) = (i64::MIN, i64::MAX);
                for &b in &back[a] {
                    let v = values[b * d + s];
                    lo = lo.max(v - 1);
                    hi = hi.min(v + 1);
                }
                if back[a].is_empty() {
                    (lo, hi) = (-3, 3);
                }
                if lo > hi {
                    continue 'attempt;
                }
                values[a * d + s] = rng.gen_range(lo..=hi);
            }
        }
        return Some(CellLabeling::new(shape, d, values).expect("sizes match"));
    }
    None
}

pub fn walk_labeling(shape: GridShape, m: usize, rng: &mut impl Rng) -> CellLabeling {
    try_walk_labeling(shape, m, rng, MAX_WALK_RESTARTS)
        .unwrap_or_else(|| polynomial_labeling(shape, rng))
}

/// Alternates between the two families with equal probability.
pub fn valid_labeling(shape: GridShape, m: usize, rng: &mut impl Rng) -> CellLabeling {
    if rng.gen_bool(0.5) {
        polynomial_labeling(shape, rng)
    } else {
        walk_labeling(shape, m, rng)
    }
}
