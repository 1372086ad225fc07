//! Monochromatic crossings of `n`-colored cube grids.
//!
//! Every coloring of `K_k^n` with colors `1..=n` has a monochromatic connected
//! family of cells meeting two opposite faces. [`find_crossing`] returns the
//! full monochromatic component that does so.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{level_components, CellIndex, CellLabeling, GridShape};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChessboardWitness {
    pub color: i64,
    /// Lexicographically sorted.
    pub cells: Vec<CellIndex>,
    /// 1-based.
    pub axis: usize,
}

/// A crossing component of a single level set, together with its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCrossing {
    pub value: Vec<i64>,
    pub cells: Vec<CellIndex>,
    pub axis: usize,
}

/// Searches the level sets of `labeling` for a component that connects
/// opposite faces. Values are tried in lexicographic order, then axes in
/// increasing order, then components by smallest member.
pub fn first_level_crossing(labeling: &CellLabeling) -> Option<LevelCrossing> {
    select_crossing(labeling, None)
}

/// Like [`first_level_crossing`] but only accepts components crossing `axis`.
pub fn first_level_crossing_on_axis(labeling: &CellLabeling, axis: usize) -> Option<LevelCrossing> {
    select_crossing(labeling, Some(axis))
}

/// First crossing component (by axis, then smallest member) of the level
/// set of `value`.
pub fn first_level_crossing_on_value(
    labeling: &CellLabeling,
    value: &[i64],
) -> Option<LevelCrossing> {
    let shape = labeling.shape();
    let mut comps = level_components(labeling);
    comps.retain(|c| !c.axes.is_empty() && labeling.value(c.cells[0]) == value);
    let axis = comps.iter().filter_map(|c| c.axes.first()).min().copied()?;
    let comp = comps.iter().find(|c| c.axes.contains(&axis))?;
    Some(LevelCrossing {
        value: value.to_vec(),
        cells: comp.cells.iter().map(|&l| shape.index(l)).collect(),
        axis,
    })
}

fn select_crossing(labeling: &CellLabeling, axis: Option<usize>) -> Option<LevelCrossing> {
    let shape = labeling.shape();
    let mut comps = level_components(labeling);
    comps.retain(|c| match axis {
        Some(a) => c.axes.contains(&a),
        None => !c.axes.is_empty(),
    });
    comps.sort_by(|a, b| {
        labeling
            .value(a.cells[0])
            .cmp(labeling.value(b.cells[0]))
            .then(a.cells[0].cmp(&b.cells[0]))
    });
    let first_value = labeling.value(comps.first()?.cells[0]).to_vec();
    let same_value: Vec<_> = comps
        .iter()
        .take_while(|c| labeling.value(c.cells[0]) == first_value.as_slice())
        .collect();
    let axis = match axis {
        Some(a) => a,
        None => same_value
            .iter()
            .filter_map(|c| c.axes.first())
            .min()
            .copied()?,
    };
    let comp = same_value.into_iter().find(|c| c.axes.contains(&axis))?;
    Some(LevelCrossing {
        value: first_value,
        cells: comp.cells.iter().map(|&l| shape.index(l)).collect(),
        axis,
    })
}

fn check_coloring(labeling: &CellLabeling) -> Result<()> {
    let n = labeling.shape().n() as i64;
    if labeling.dim() != 1 {
        return Err(Error::invalid(format!(
            "a coloring has 1-dimensional values, got dimension {}",
            labeling.dim()
        )));
    }
    if let Some((pos, c)) = labeling
        .raw()
        .iter()
        .enumerate()
        .find(|(_, &c)| c < 1 || c > n)
    {
        return Err(Error::invalid(format!(
            "cell {:?} has color {c}, outside 1..={n}",
            labeling.shape().index(pos)
        )));
    }
    Ok(())
}

pub fn find_crossing(labeling: &CellLabeling) -> Result<ChessboardWitness> {
    find_crossing_preferring(labeling, None)
}

/// Returns a crossing of `prefer_axis` when one exists and falls back to the
/// default selection otherwise.
pub fn find_crossing_preferring(
    labeling: &CellLabeling,
    prefer_axis: Option<usize>,
) -> Result<ChessboardWitness> {
    check_coloring(labeling)?;
    let preferred = prefer_axis.and_then(|a| first_level_crossing_on_axis(labeling, a));
    let found = preferred
        .or_else(|| first_level_crossing(labeling))
        .ok_or_else(|| {
            Error::TheoremViolation(format!(
                "no monochromatic crossing in an {}-coloring of [{}]^{}",
                labeling.shape().n(),
                labeling.shape().k(),
                labeling.shape().n()
            ))
        })?;
    Ok(ChessboardWitness {
        color: found.value[0],
        cells: found.cells,
        axis: found.axis,
    })
}

/// Structural check of a chessboard witness against its coloring, written
/// independently of the search: breadth-first flood fill and exact face
/// contact from the cell boxes.
pub fn verify_chessboard(labeling: &CellLabeling, w: &ChessboardWitness) -> Result<()> {
    let shape = labeling.shape();
    crate::check::require_cells_valued(labeling, &w.cells, |v| v == [w.color])?;
    crate::check::require_crossing(&w.cells, w.axis, shape)?;
    Ok(())
}

pub fn random_coloring(shape: GridShape, colors: usize, rng: &mut impl rand::Rng) -> CellLabeling {
    let values = (0..shape.cell_count())
        .map(|_| rng.gen_range(1..=colors as i64))
        .collect();
    CellLabeling::from_colors(shape, values).expect("length matches shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coloring(n: usize, k: usize, colors: &[i64]) -> CellLabeling {
        CellLabeling::from_colors(GridShape::new(n, k).unwrap(), colors.to_vec()).unwrap()
    }

    #[test]
    fn constant_coloring_crosses_everything() {
        let l = coloring(2, 3, &[1; 9]);
        let w = find_crossing(&l).unwrap();
        assert_eq!((w.color, w.axis, w.cells.len()), (1, 1, 9));
    }

    #[test]
    fn diagonal_two_by_two() {
        let l = coloring(2, 2, &[1, 2, 2, 1]);
        let w = find_crossing(&l).unwrap();
        assert_eq!(w.color, 1);
        assert_eq!(w.axis, 1);
        assert_eq!(
            w.cells,
            vec![CellIndex::from([1, 1]), CellIndex::from([2, 2])]
        );
        verify_chessboard(&l, &w).unwrap();
    }

    #[test]
    fn striped_columns() {
        // columns (first index) colored 1, 2, 1
        let l = CellLabeling::from_fn(GridShape::new(2, 3).unwrap(), 1, |c| {
            vec![if c.0[0] == 2 { 2 } else { 1 }]
        })
        .unwrap();
        let w = find_crossing(&l).unwrap();
        assert_eq!(w.color, 1);
        assert_eq!(w.axis, 2);
        assert_eq!(
            w.cells,
            (1..=3).map(|j| CellIndex::from([1, j])).collect::<Vec<_>>()
        );
    }

    #[test]
    fn rejects_out_of_range_colors() {
        assert!(matches!(
            find_crossing(&coloring(2, 2, &[1, 3, 1, 1])),
            Err(Error::InvalidInput(_))
        ));
        let l = CellLabeling::new(GridShape::new(1, 2).unwrap(), 2, vec![1, 1, 1, 1]).unwrap();
        assert!(find_crossing(&l).is_err());
    }

    #[test]
    fn four_colors_on_two_by_two_never_cross() {
        assert!(first_level_crossing(&coloring(2, 2, &[1, 2, 3, 4])).is_none());
    }

    #[test]
    fn random_colorings_always_cross() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, k) in [(2, 2), (2, 5), (3, 3), (3, 4), (4, 3)] {
            for _ in 0..50 {
                let l = random_coloring(GridShape::new(n, k).unwrap(), n, &mut rng);
                let w = find_crossing(&l).unwrap();
                verify_chessboard(&l, &w).unwrap();
                assert!(w.cells.len() >= k);
                assert_eq!(find_crossing(&l).unwrap(), w);
            }
        }
    }
}
