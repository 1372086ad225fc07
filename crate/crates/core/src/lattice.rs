//! Points of `Z^d` under the l∞ metric and 1-connectivity of finite point sets.
//!
//! Coordinates are `i64`. Every shipped scenario keeps `|coord| <= 10^6`, far
//! from overflow in any of the products formed by the coloring code.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsu::UnionFind;
use crate::error::{Error, Result};

/// A point of `Z^d`. `d = 0` is the one-point space `Z^0 = {0}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn origin(dim: usize) -> Self {
        LatticePoint(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn offset(&self, delta: &[i64]) -> LatticePoint {
        debug_assert_eq!(self.dim(), delta.len());
        LatticePoint(self.0.iter().zip(delta).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for LatticePoint {
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

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl<const N: usize> From<[i64; N]> for LatticePoint {
    fn from(v: [i64; N]) -> Self {
        LatticePoint(v.to_vec())
    }
}

/// l∞ distance on raw coordinate slices of equal length.
pub(crate) fn linf(a: &[i64], b: &[i64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.abs_diff(*y))
        .max()
        .unwrap_or(0)
}

pub fn linf_distance(a: &LatticePoint, b: &LatticePoint) -> Result<u64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(linf(&a.0, &b.0))
}

/// A finite set of lattice points of one common dimension, iterated in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSet {
    dim: usize,
    points: BTreeSet<LatticePoint>,
}

impl LatticeSet {
    pub fn new(dim: usize) -> Self {
        LatticeSet {
            dim,
            points: BTreeSet::new(),
        }
    }

    pub fn from_points<I>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = LatticePoint>,
    {
        let mut set = LatticeSet::new(dim);
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    /// Returns `false` when the point was already present.
    pub fn insert(&mut self, p: LatticePoint) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        Ok(self.points.insert(p))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.points.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LatticePoint> + '_ {
        self.points.iter()
    }

    pub fn first(&self) -> Option<&LatticePoint> {
        self.points.iter().next()
    }

    pub fn union_with(&mut self, other: &LatticeSet) -> Result<()> {
        for p in other.iter() {
            self.insert(p.clone())?;
        }
        Ok(())
    }

    pub fn intersection(&self, other: &LatticeSet) -> LatticeSet {
        LatticeSet {
            dim: self.dim,
            points: self.points.intersection(&other.points).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &LatticeSet) -> bool {
        self.points.is_subset(&other.points)
    }
}

impl<'a> IntoIterator for &'a LatticeSet {
    type Item = &'a LatticePoint;
    type IntoIter = std::collections::btree_set::Iter<'a, LatticePoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// All nonzero offsets of l∞ norm at most `radius` in dimension `dim`,
/// in lexicographic order.
pub(crate) fn offsets_within(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * (2 * radius as usize + 1));
        for prefix in &out {
            for c in -radius..=radius {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out.retain(|v| v.iter().any(|&c| c != 0));
    out
}

/// Components under the relation "l∞ distance at most `radius`".
pub(crate) fn r_connected_components(set: &LatticeSet, radius: i64) -> Vec<LatticeSet> {
    let points: Vec<&LatticePoint> = set.iter().collect();
    let index: HashMap<&LatticePoint, usize> =
        points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut uf = UnionFind::new(points.len());
    let offsets = offsets_within(set.dim(), radius);
    for (i, p) in points.iter().enumerate() {
        for off in &offsets {
            if let Some(&j) = index.get(&p.offset(off)) {
                uf.union(i, j);
            }
        }
    }
    uf.groups()
        .into_iter()
        .map(|g| LatticeSet {
            dim: set.dim(),
            points: g.into_iter().map(|i| points[i].clone()).collect(),
        })
        .collect()
}

/// Maximal 1-connected parts of `set`, ordered by their lexicographically
/// smallest member.
pub fn one_connected_components(set: &LatticeSet) -> Vec<LatticeSet> {
    r_connected_components(set, 1)
}

pub fn is_one_connected(set: &LatticeSet) -> bool {
    set.is_empty() || one_connected_components(set).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set2(points: &[[i64; 2]]) -> LatticeSet {
        LatticeSet::from_points(2, points.iter().map(|p| LatticePoint::from(*p))).unwrap()
    }

    #[test]
    fn distance_examples() {
        let d = |a: &[i64], b: &[i64]| {
            linf_distance(&LatticePoint(a.to_vec()), &LatticePoint(b.to_vec())).unwrap()
        };
        assert_eq!(d(&[3, 5], &[3, 5]), 0);
        assert_eq!(d(&[0, 0], &[1, -1]), 1);
        assert_eq!(d(&[2, 0, 7], &[-1, 0, 7]), 3);
        assert_eq!(d(&[], &[]), 0);
    }

    #[test]
    fn distance_rejects_mixed_dimensions() {
        let err = linf_distance(&LatticePoint::from([1, 2]), &LatticePoint::from([1])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn component_examples() {
        assert_eq!(
            one_connected_components(&set2(&[[0, 0]])),
            vec![set2(&[[0, 0]])]
        );
        assert_eq!(
            one_connected_components(&set2(&[[0, 0], [1, 1], [3, 3]])),
            vec![set2(&[[0, 0], [1, 1]]), set2(&[[3, 3]])]
        );
        assert_eq!(
            one_connected_components(&set2(&[[0, 0], [2, 0], [1, 1]])),
            vec![set2(&[[0, 0], [1, 1], [2, 0]])]
        );
        assert!(one_connected_components(&LatticeSet::new(3)).is_empty());
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_one_connected(&LatticeSet::new(2)));
        assert!(is_one_connected(&set2(&[[0, 0], [1, 1]])));
        assert!(!is_one_connected(&set2(&[[0, 0], [0, 2]])));
    }

    #[test]
    fn zero_dimensional_space_is_a_point() {
        let s = LatticeSet::from_points(0, [LatticePoint::origin(0)]).unwrap();
        assert_eq!(s.len(), 1);
        assert!(is_one_connected(&s));
    }

    #[test]
    fn offsets_count() {
        assert_eq!(offsets_within(2, 1).len(), 8);
        assert_eq!(offsets_within(3, 1).len(), 26);
        assert_eq!(offsets_within(2, 2).len(), 24);
        assert!(offsets_within(0, 1).is_empty());
    }

    // Transitive closure by repeated relaxation, independent of union-find.
    fn closure_labels(points: &[LatticePoint]) -> Vec<usize> {
        let mut label: Vec<usize> = (0..points.len()).collect();
        loop {
            let mut changed = false;
            for i in 0..points.len() {
                for j in 0..points.len() {
                    if linf(&points[i].0, &points[j].0) <= 1 && label[j] < label[i] {
                        label[i] = label[j];
                        changed = true;
                    }
                }
            }
            if !changed {
                return label;
            }
        }
    }

    fn arb_set() -> impl Strategy<Value = LatticeSet> {
        (1usize..=3).prop_flat_map(|d| {
            prop::collection::vec(prop::collection::vec(-4i64..=4, d), 0..40).prop_map(move |pts| {
                LatticeSet::from_points(d, pts.into_iter().map(LatticePoint)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn components_partition_and_separate(set in arb_set()) {
            let parts = one_connected_components(&set);
            let total: usize = parts.iter().map(|p| p.len()).sum();
            prop_assert_eq!(total, set.len());
            let mut union = LatticeSet::new(set.dim());
            for p in &parts {
                union.union_with(p).unwrap();
                prop_assert!(is_one_connected(p));
            }
            prop_assert_eq!(&union, &set);
            for (i, a) in parts.iter().enumerate() {
                for b in &parts[i + 1..] {
                    for x in a.iter() {
                        for y in b.iter() {
                            prop_assert!(linf(&x.0, &y.0) >= 2);
                        }
                    }
                }
            }
            for w in parts.windows(2) {
                prop_assert!(w[0].first() < w[1].first());
            }
        }

        #[test]
        fn components_match_transitive_closure(set in arb_set()) {
            let points: Vec<LatticePoint> = set.iter().cloned().collect();
            let labels = closure_labels(&points);
            let distinct: BTreeSet<usize> = labels.iter().copied().collect();
            prop_assert_eq!(distinct.len(), one_connected_components(&set).len());
        }

        #[test]
        fn linf_is_a_metric(
            a in prop::collection::vec(-100i64..100, 3),
            b in prop::collection::vec(-100i64..100, 3),
            c in prop::collection::vec(-100i64..100, 3),
        ) {
            prop_assert_eq!(linf(&a, &b), linf(&b, &a));
            prop_assert_eq!(linf(&a, &b) == 0, a == b);
            prop_assert!(linf(&a, &c) <= linf(&a, &b) + linf(&b, &c));
        }
    }
}
