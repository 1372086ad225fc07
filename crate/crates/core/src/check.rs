//! Independent witness checkers.
//!
//! Nothing here reuses the union-find search code: connectivity is decided by
//! breadth-first flood fill and face contact by the exact cell boxes.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::grid::{cube_bounds, CellIndex, CellLabeling, GridShape};
use crate::lattice::{LatticePoint, LatticeSet};

fn fail(msg: String) -> Error {
    Error::TheoremViolation(msg)
}

/// Flood fill over cells, stepping to cells at index distance at most 1.
pub fn cells_connected(cells: &[CellIndex]) -> bool {
    let set: HashSet<&CellIndex> = cells.iter().collect();
    let Some(start) = cells.first() else {
        return false;
    };
    let mut seen: HashSet<&CellIndex> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for d in &set {
            if !seen.contains(d) && c.0.iter().zip(&d.0).all(|(a, b)| a.abs_diff(*b) <= 1) {
                seen.insert(d);
                queue.push_back(d);
            }
        }
    }
    seen.len() == set.len()
}

/// Like [`cells_connected`] but with hashed neighbour lookup, for large
/// families.
pub fn cells_connected_fast(cells: &[CellIndex]) -> bool {
    let set: HashSet<&[u32]> = cells.iter().map(|c| c.0.as_slice()).collect();
    let Some(start) = cells.first() else {
        return false;
    };
    let n = start.0.len();
    let mut seen: HashSet<Vec<u32>> = HashSet::from([start.0.clone()]);
    let mut queue = VecDeque::from([start.0.clone()]);
    let mut nb = vec![0u32; n];
    while let Some(c) = queue.pop_front() {
        for code in 0..3usize.pow(n as u32) {
            let mut rest = code;
            let mut ok = true;
            for s in 0..n {
                let step = (rest % 3) as i64 - 1;
                rest /= 3;
                let x = c[s] as i64 + step;
                if x < 1 {
                    ok = false;
                    break;
                }
                nb[s] = x as u32;
            }
            if ok && set.contains(nb.as_slice()) && !seen.contains(&nb) {
                seen.insert(nb.clone());
                queue.push_back(nb.clone());
            }
        }
    }
    seen.len() == set.len()
}

/// 1-connectivity of a lattice set by flood fill.
pub fn lattice_connected(set: &LatticeSet) -> bool {
    let points: Vec<&LatticePoint> = set.iter().collect();
    let Some(&start) = points.first() else {
        return true;
    };
    let mut seen: HashSet<&LatticePoint> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for &q in &points {
            if !seen.contains(q)
                && p.coords()
                    .iter()
                    .zip(q.coords())
                    .all(|(a, b)| a.abs_diff(*b) <= 1)
            {
                seen.insert(q);
                queue.push_back(q);
            }
        }
    }
    seen.len() == points.len()
}

/// Checks that `cells` is a nonempty connected family whose union meets both
/// faces `x_axis = 0` and `x_axis = 1`.
pub fn require_crossing(cells: &[CellIndex], axis: usize, shape: GridShape) -> Result<()> {
    if cells.is_empty() {
        return Err(fail("witness has no cells".into()));
    }
    if axis < 1 || axis > shape.n() {
        return Err(fail(format!("axis {axis} outside 1..={}", shape.n())));
    }
    let mut lower = false;
    let mut upper = false;
    for c in cells {
        let b = cube_bounds(c, shape).map_err(|e| fail(e.to_string()))?;
        lower |= b.touches_lower_face(axis - 1);
        upper |= b.touches_upper_face(axis - 1);
    }
    if !(lower && upper) {
        return Err(fail(format!("cells do not meet both faces of axis {axis}")));
    }
    let connected = if cells.len() <= 2000 {
        cells_connected(cells)
    } else {
        cells_connected_fast(cells)
    };
    if !connected {
        return Err(fail("witness cells are not connected".into()));
    }
    if cells.len() < shape.k() {
        return Err(fail(format!(
            "a crossing family needs at least {} cells, got {}",
            shape.k(),
            cells.len()
        )));
    }
    Ok(())
}

pub fn require_cells_valued(
    labeling: &CellLabeling,
    cells: &[CellIndex],
    mut accept: impl FnMut(&[i64]) -> bool,
) -> Result<()> {
    for c in cells {
        if !labeling.shape().contains(c) {
            return Err(fail(format!("cell {c:?} is outside the grid")));
        }
        let v = labeling.value_at(c);
        if !accept(v) {
            return Err(fail(format!("cell {c:?} has unexpected value {v:?}")));
        }
    }
    Ok(())
}
