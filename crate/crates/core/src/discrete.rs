//! Lattice-valued labelings of cube grids whose values move by at most one
//! across every shared face of dimension at least `m`.
//!
//! [`solve`] composes such a labeling with the clustered coloring of
//! `Z^{n-1}` at distance `m + 1`, takes a monochromatic crossing of the
//! resulting `n`-coloring and reports the cluster holding its values. The
//! cluster is 1-connected with `(n-1)! (m+1)^{n-1}` points.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::coloring::{cluster_of, decode_into, enumerate_cluster, ColoringParams};
use crate::error::{Error, Result};
use crate::grid::{CellIndex, CellLabeling, GridShape, Neighbourhood};
use crate::lattice::{linf, LatticePoint, LatticeSet};
use crate::steinhaus::find_crossing_preferring;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteWitness {
    /// 1-connected set of values containing every witness cell's value.
    pub p: LatticeSet,
    /// Lexicographically sorted.
    pub cells: Vec<CellIndex>,
    /// 1-based.
    pub axis: usize,
    /// `(n-1)! (m+1)^{n-1}`.
    pub bound: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Replace the full cluster by a 1-connected subset of it that still
    /// contains every value met by the witness cells.
    pub shrink: bool,
    /// Prefer a crossing of this axis (1-based) when the coloring has one.
    pub prefer_axis: Option<usize>,
}

/// `(n-1)! (m+1)^{n-1}`.
pub fn size_bound(n: usize, m: usize) -> u64 {
    let fact: u64 = (1..n as u64).product();
    fact * (m as u64 + 1).pow(n as u32 - 1)
}

fn check_shape(labeling: &CellLabeling, m: usize) -> Result<()> {
    let n = labeling.shape().n();
    if m > n - 1 {
        return Err(Error::invalid(format!(
            "m = {m} must satisfy m <= n - 1 = {}",
            n - 1
        )));
    }
    if labeling.dim() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: labeling.dim(),
        });
    }
    Ok(())
}

/// All cell pairs sharing a face of dimension at least `m` whose values are
/// more than 1 apart in l∞, sorted lexicographically.
pub fn validate_condition(
    labeling: &CellLabeling,
    m: usize,
) -> Result<Vec<(CellIndex, CellIndex)>> {
    check_shape(labeling, m)?;
    let shape = labeling.shape();
    let mut bad = Vec::new();
    Neighbourhood::forward(shape, m as i32).for_each_pair(shape, |a, b| {
        if linf(labeling.value(a), labeling.value(b)) > 1 {
            bad.push((a, b));
        }
    });
    bad.sort_unstable();
    Ok(bad
        .into_iter()
        .map(|(a, b)| (shape.index(a), shape.index(b)))
        .collect())
}

/// Largest value distance across any pair of cells that touch at all.
pub fn max_touching_gap(labeling: &CellLabeling) -> u64 {
    let shape = labeling.shape();
    let mut worst = 0;
    Neighbourhood::forward(shape, 0).for_each_pair(shape, |a, b| {
        worst = worst.max(linf(labeling.value(a), labeling.value(b)));
    });
    worst
}

pub fn solve(labeling: &CellLabeling, m: usize, opts: SolveOptions) -> Result<DiscreteWitness> {
    check_shape(labeling, m)?;
    let violations = validate_condition(labeling, m)?;
    if let Some((a, b)) = violations.first() {
        return Err(Error::invalid(format!(
            "labeling violates the condition at m = {m}: cells {a:?} and {b:?} ({} violating pairs)",
            violations.len()
        )));
    }
    let shape = labeling.shape();
    let n = shape.n();
    let bound = size_bound(n, m);
    if n == 1 {
        return Ok(DiscreteWitness {
            p: LatticeSet::from_points(0, [LatticePoint::origin(0)])?,
            cells: shape.cells().collect(),
            axis: 1,
            bound,
        });
    }

    let params = ColoringParams::new(n - 1, m as i64 + 1)?;
    let colors = color_cells(labeling, params);
    let crossing =
        find_crossing_preferring(&CellLabeling::from_colors(shape, colors)?, opts.prefer_axis)?;

    let first = LatticePoint(labeling.value_at(&crossing.cells[0]).to_vec());
    let id = cluster_of(&first, params)?;
    let mut values = BTreeSet::new();
    for c in &crossing.cells {
        let v = labeling.value_at(c);
        if values.insert(v) && cluster_of(&LatticePoint(v.to_vec()), params)? != id {
            return Err(Error::TheoremViolation(format!(
                "values {first:?} and {v:?} of one monochromatic crossing lie in different clusters"
            )));
        }
    }
    let cluster = enumerate_cluster(&id, params)?;
    let p = if opts.shrink {
        let targets =
            LatticeSet::from_points(n - 1, values.into_iter().map(|v| LatticePoint(v.to_vec())))?;
        connect_within(&cluster, &targets)?
    } else {
        cluster
    };
    Ok(DiscreteWitness {
        p,
        cells: crossing.cells,
        axis: crossing.axis,
        bound,
    })
}

/// Color of every cell's value under `params`, memoized per distinct value.
fn color_cells(labeling: &CellLabeling, params: ColoringParams) -> Vec<i64> {
    let d = labeling.dim();
    let mut cache: HashMap<Box<[i64]>, i64> = HashMap::new();
    let (mut v, mut u) = (vec![0i64; d], vec![0i64; d]);
    (0..labeling.shape().cell_count())
        .map(|l| {
            let val = labeling.value(l);
            if let Some(&c) = cache.get(val) {
                return c;
            }
            let c = decode_into(val, params.m(), &mut v, &mut u) as i64 + 1;
            cache.insert(val.into(), c);
            c
        })
        .collect()
}

/// A 1-connected subset of `within` containing `targets`, grown from the
/// smallest target by repeatedly adding a shortest path (inside `within`)
/// to the nearest target not yet reached.
pub fn connect_within(within: &LatticeSet, targets: &LatticeSet) -> Result<LatticeSet> {
    if !targets.is_subset(within) {
        return Err(Error::invalid(
            "targets are not contained in the connecting set",
        ));
    }
    let points: Vec<&LatticePoint> = within.iter().collect();
    let pos: HashMap<&LatticePoint, usize> =
        points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut chosen = vec![false; points.len()];
    let Some(start) = targets.first() else {
        return Ok(LatticeSet::new(within.dim()));
    };
    chosen[pos[start]] = true;
    loop {
        let missing = targets.iter().any(|t| !chosen[pos[t]]);
        if !missing {
            break;
        }
        // multi-source BFS from the chosen set
        let mut prev = vec![usize::MAX; points.len()];
        let mut queue: VecDeque<usize> = (0..points.len()).filter(|&i| chosen[i]).collect();
        for &i in &queue {
            prev[i] = i;
        }
        let mut hit = None;
        'bfs: while let Some(i) = queue.pop_front() {
            for j in 0..points.len() {
                if prev[j] == usize::MAX && linf(points[i].coords(), points[j].coords()) <= 1 {
                    prev[j] = i;
                    if targets.contains(points[j]) {
                        hit = Some(j);
                        break 'bfs;
                    }
                    queue.push_back(j);
                }
            }
        }
        let mut j =
            hit.ok_or_else(|| Error::invalid("targets are not 1-connected inside the set"))?;
        while !chosen[j] {
            chosen[j] = true;
            j = prev[j];
        }
    }
    LatticeSet::from_points(
        within.dim(),
        points
            .iter()
            .zip(&chosen)
            .filter(|(_, &c)| c)
            .map(|(p, _)| (*p).clone()),
    )
}

/// Checks every structural claim of a discrete witness without reusing the
/// search code.
pub fn verify_discrete(labeling: &CellLabeling, m: usize, w: &DiscreteWitness) -> Result<()> {
    let shape: GridShape = labeling.shape();
    let n = shape.n();
    let fact: u64 = (1..n as u64).product();
    let expected_bound = fact * (m as u64 + 1).pow(n as u32 - 1);
    let fail = |msg: String| Err(Error::TheoremViolation(msg));
    if w.bound != expected_bound {
        return fail(format!("bound {} differs from {expected_bound}", w.bound));
    }
    if w.p.dim() != n - 1 {
        return fail(format!("P has dimension {}, expected {}", w.p.dim(), n - 1));
    }
    if !crate::check::lattice_connected(&w.p) {
        return fail("P is not 1-connected".into());
    }
    if w.p.len() as u64 > expected_bound {
        return fail(format!("|P| = {} exceeds {expected_bound}", w.p.len()));
    }
    crate::check::require_cells_valued(labeling, &w.cells, |v| {
        w.p.contains(&LatticePoint(v.to_vec()))
    })?;
    crate::check::require_crossing(&w.cells, w.axis, shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shape(n: usize, k: usize) -> GridShape {
        GridShape::new(n, k).unwrap()
    }

    #[test]
    fn bound_values() {
        assert_eq!(size_bound(1, 0), 1);
        assert_eq!(size_bound(2, 0), 1);
        assert_eq!(size_bound(2, 1), 2);
        assert_eq!(size_bound(3, 0), 2);
        assert_eq!(size_bound(3, 1), 8);
        assert_eq!(size_bound(3, 2), 18);
        assert_eq!(size_bound(4, 0), 6);
    }

    #[test]
    fn constant_labeling_is_valid() {
        let l = CellLabeling::new(shape(3, 3), 2, [4, -2].repeat(27)).unwrap();
        for m in 0..=2 {
            assert!(validate_condition(&l, m).unwrap().is_empty());
        }
        let w = solve(&l, 0, SolveOptions::default()).unwrap();
        assert!(w.p.contains(&LatticePoint::from([4, -2])));
        assert_eq!(w.cells.len(), 27);
        verify_discrete(&l, 0, &w).unwrap();
    }

    #[test]
    fn column_index_labeling() {
        let l = CellLabeling::from_fn(shape(2, 2), 1, |c| vec![c.0[0] as i64]).unwrap();
        assert!(validate_condition(&l, 1).unwrap().is_empty());

        let l = CellLabeling::from_fn(shape(2, 3), 1, |c| vec![c.0[0] as i64]).unwrap();
        let w = solve(&l, 1, SolveOptions::default()).unwrap();
        verify_discrete(&l, 1, &w).unwrap();
        assert!(w.p.len() <= 2);
        assert_eq!(w.bound, 2);
        assert!(crate::grid::crossing_axes(&w.cells, l.shape())
            .unwrap()
            .contains(&2));
    }

    // Brute force over single values and 1-connected value pairs: some
    // crossing family with |P| <= 2 exists for the column labeling.
    #[test]
    fn column_labeling_brute_force_oracle() {
        let s = shape(2, 3);
        let l = CellLabeling::from_fn(s, 1, |c| vec![c.0[0] as i64]).unwrap();
        let mut candidates: Vec<Vec<i64>> = (1..=3).map(|v| vec![v]).collect();
        candidates.extend((1..=2).map(|v| vec![v, v + 1]));
        let found = candidates.iter().any(|vals| {
            let cells: Vec<CellIndex> = s
                .cells()
                .filter(|c| vals.contains(&l.value_at(c)[0]))
                .collect();
            crate::grid::components_min_dim(&cells, 0, s)
                .unwrap()
                .iter()
                .any(|comp| !crate::grid::crossing_axes(comp, s).unwrap().is_empty())
        });
        assert!(found);
    }

    #[test]
    fn spike_is_reported() {
        let l = CellLabeling::from_fn(shape(2, 2), 1, |c| vec![if c.0 == [2, 2] { 5 } else { 0 }])
            .unwrap();
        let bad = validate_condition(&l, 1).unwrap();
        assert!(bad.contains(&(CellIndex::from([1, 2]), CellIndex::from([2, 2]))));
        assert!(bad.contains(&(CellIndex::from([2, 1]), CellIndex::from([2, 2]))));
        assert_eq!(bad.len(), 2);
        assert_eq!(validate_condition(&l, 0).unwrap().len(), 3);
        assert!(matches!(
            solve(&l, 1, SolveOptions::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn preconditions() {
        let l = CellLabeling::new(shape(2, 2), 2, vec![0; 8]).unwrap();
        assert!(matches!(
            validate_condition(&l, 0),
            Err(Error::DimensionMismatch { .. })
        ));
        let l = CellLabeling::new(shape(2, 2), 1, vec![0; 4]).unwrap();
        assert!(validate_condition(&l, 2).is_err());
    }

    #[test]
    fn one_dimensional_case_is_the_whole_segment() {
        let l = CellLabeling::new(shape(1, 5), 0, vec![]).unwrap();
        let w = solve(&l, 0, SolveOptions::default()).unwrap();
        assert_eq!(w.cells.len(), 5);
        assert_eq!(w.p.len(), 1);
        verify_discrete(&l, 0, &w).unwrap();
    }

    #[test]
    fn random_labelings_meet_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, m) in [(2, 0), (2, 1), (3, 0), (3, 1), (3, 2)] {
            for i in 0..40 {
                let k = 2 + i % 3;
                let l = gen::valid_labeling(shape(n, k), m, &mut rng);
                assert!(validate_condition(&l, m).unwrap().is_empty());
                for shrink in [false, true] {
                    let w = solve(
                        &l,
                        m,
                        SolveOptions {
                            shrink,
                            ..Default::default()
                        },
                    )
                    .unwrap();
                    verify_discrete(&l, m, &w).unwrap();
                    assert!(w.p.len() as u64 <= size_bound(n, m));
                }
            }
        }
    }

    #[test]
    fn shrink_keeps_values_and_connectivity() {
        let within = LatticeSet::from_points(
            2,
            [[0, 0], [0, 1], [0, 2], [1, 2], [2, 2], [2, 1]].map(LatticePoint::from),
        )
        .unwrap();
        let targets = LatticeSet::from_points(2, [[0, 0], [2, 1]].map(LatticePoint::from)).unwrap();
        let got = connect_within(&within, &targets).unwrap();
        assert!(targets.is_subset(&got));
        assert!(crate::check::lattice_connected(&got));
        assert!(got.len() < within.len());
    }

    #[test]
    fn stronger_condition_bounds_touching_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, m) in [(2, 1), (3, 1), (3, 2)] {
            for _ in 0..30 {
                let l = gen::walk_labeling(shape(n, 4), m, &mut rng);
                assert!(max_touching_gap(&l) <= m as u64 + 1);
            }
        }
    }
}
