//! An explicit `m`-distance clustered `(n+1)`-coloring of `Z^n`.
//!
//! `Z^n` is tiled by translates `V + A u + k (m, ..., m)` of the box
//! `V = [m] x [2m] x ... x [nm]`, where `A` is upper triangular with
//! `(i+1) m` on the diagonal and `m` above it. A point gets color `k + 1`.
//! Each translate is one monochromatic cluster of `n! m^n` points, and two
//! clusters of the same color are more than `m` apart in l∞.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticePoint, LatticeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColoringParams {
    n: usize,
    m: i64,
}

impl ColoringParams {
    pub fn new(n: usize, m: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("coloring dimension n must be at least 1"));
        }
        if m < 1 {
            return Err(Error::invalid("coloring distance m must be at least 1"));
        }
        Ok(ColoringParams { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// Number of colors, `n + 1`.
    pub fn colors(&self) -> usize {
        self.n + 1
    }

    /// `n! m^n`, the size of every cluster.
    pub fn cluster_size(&self) -> u64 {
        (1..=self.n as u64).product::<u64>() * (self.m as u64).pow(self.n as u32)
    }

    fn check_dim(&self, t: &LatticePoint) -> Result<()> {
        if t.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: t.dim(),
            });
        }
        Ok(())
    }
}

/// The decomposition `t = v + A u + k (m, ..., m)` of a lattice point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decode {
    pub v: LatticePoint,
    pub u: LatticePoint,
    pub k: usize,
}

/// Identifies the cluster `V + A u + k (m, ..., m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClusterId {
    pub k: usize,
    pub u: LatticePoint,
}

pub fn matrix_a(params: ColoringParams) -> Vec<Vec<i64>> {
    let (n, m) = (params.n, params.m);
    (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Greater => 0,
                    std::cmp::Ordering::Equal => (i as i64 + 1) * m,
                    std::cmp::Ordering::Less => m,
                })
                .collect()
        })
        .collect()
}

fn exact_div(num: i64, den: i64, what: &str) -> i64 {
    assert!(
        num.rem_euclid(den) == 0,
        "inexact division in {what}: {num} / {den}"
    );
    num / den
}

/// Decodes raw coordinates into caller-provided buffers and returns `k`.
/// Panics if a division that must be exact is not; that can only happen
/// through a coding error.
pub(crate) fn decode_into(t: &[i64], m: i64, v: &mut [i64], u: &mut [i64]) -> usize {
    let n = t.len();
    debug_assert!(n >= 1 && v.len() == n && u.len() == n);
    v[0] = (t[0] - 1).rem_euclid(m) + 1;
    for i in 1..n {
        let im = (i as i64 + 1) * m;
        v[i] = ((t[i] - t[i - 1]).rem_euclid(im) + v[i - 1] - 1).rem_euclid(im) + 1;
    }
    let q = exact_div(t[n - 1] - v[n - 1], m, "k");
    let k = q.rem_euclid(n as i64 + 1);
    u[n - 1] = exact_div(q - k, n as i64 + 1, "u_n");
    for i in (1..n).rev() {
        let im = (i as i64 + 1) * m;
        u[i - 1] = u[i] - exact_div(t[i] - t[i - 1] - (v[i] - v[i - 1]), im, "u_i");
    }
    k as usize
}

pub(crate) fn decode_coords(t: &[i64], n: usize, m: i64) -> (Vec<i64>, Vec<i64>, usize) {
    debug_assert_eq!(t.len(), n);
    let mut v = vec![0i64; n];
    let mut u = vec![0i64; n];
    let k = decode_into(t, m, &mut v, &mut u);
    (v, u, k)
}

pub fn decode(t: &LatticePoint, params: ColoringParams) -> Result<Decode> {
    params.check_dim(t)?;
    let (v, u, k) = decode_coords(t.coords(), params.n, params.m);
    Ok(Decode {
        v: LatticePoint(v),
        u: LatticePoint(u),
        k,
    })
}

/// The color `k + 1` in `1..=n+1`.
pub fn color(t: &LatticePoint, params: ColoringParams) -> Result<usize> {
    Ok(decode(t, params)?.k + 1)
}

pub fn cluster_of(t: &LatticePoint, params: ColoringParams) -> Result<ClusterId> {
    let d = decode(t, params)?;
    Ok(ClusterId { k: d.k, u: d.u })
}

/// `v + A u + k (m, ..., m)`.
pub fn reconstruct(d: &Decode, params: ColoringParams) -> LatticePoint {
    let mut t = cluster_base(&d.u.0, d.k, params);
    for (ti, vi) in t.iter_mut().zip(d.v.coords()) {
        *ti += vi;
    }
    LatticePoint(t)
}

/// `A u + k (m, ..., m)`.
fn cluster_base(u: &[i64], k: usize, params: ColoringParams) -> Vec<i64> {
    let (n, m) = (params.n, params.m);
    let mut tail = 0i64;
    let mut base = vec![0i64; n];
    for i in (0..n).rev() {
        base[i] = (i as i64 + 2) * m * u[i] + m * tail + k as i64 * m;
        tail += u[i];
    }
    base
}

/// Lower and upper corners of the box `V`, inclusive.
pub fn box_v(params: ColoringParams) -> (Vec<i64>, Vec<i64>) {
    (
        vec![1; params.n],
        (1..=params.n as i64).map(|i| i * params.m).collect(),
    )
}

pub fn enumerate_cluster(id: &ClusterId, params: ColoringParams) -> Result<LatticeSet> {
    if id.k > params.n {
        return Err(Error::invalid(format!(
            "cluster index k = {} exceeds n = {}",
            id.k, params.n
        )));
    }
    if id.u.dim() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: id.u.dim(),
        });
    }
    let base = cluster_base(id.u.coords(), id.k, params);
    let (_, hi) = box_v(params);
    let mut set = LatticeSet::new(params.n);
    let mut v = vec![1i64; params.n];
    loop {
        let p: Vec<i64> = base.iter().zip(&v).map(|(b, x)| b + x).collect();
        set.insert(LatticePoint(p))?;
        // odometer, last coordinate fastest
        let mut s = params.n;
        loop {
            if s == 0 {
                return Ok(set);
            }
            s -= 1;
            if v[s] < hi[s] {
                v[s] += 1;
                break;
            }
            v[s] = 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{is_one_connected, linf};
    use proptest::prelude::*;

    fn p(n: usize, m: i64) -> ColoringParams {
        ColoringParams::new(n, m).unwrap()
    }

    #[test]
    fn rejects_degenerate_params() {
        assert!(ColoringParams::new(0, 1).is_err());
        assert!(ColoringParams::new(1, 0).is_err());
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(matrix_a(p(1, 2)), vec![vec![4]]);
        assert_eq!(matrix_a(p(2, 1)), vec![vec![2, 1], vec![0, 3]]);
        assert_eq!(
            matrix_a(p(3, 2)),
            vec![vec![4, 2, 2], vec![0, 6, 2], vec![0, 0, 8]]
        );
    }

    // Oracle: A u computed by explicit matrix-vector product.
    fn reconstruct_by_matrix(d: &Decode, params: ColoringParams) -> Vec<i64> {
        let a = matrix_a(params);
        (0..params.n())
            .map(|i| {
                d.v.coords()[i]
                    + (0..params.n())
                        .map(|j| a[i][j] * d.u.coords()[j])
                        .sum::<i64>()
                    + d.k as i64 * params.m()
            })
            .collect()
    }

    #[test]
    fn decode_examples() {
        let d = decode(&LatticePoint::from([0, 0]), p(2, 1)).unwrap();
        assert_eq!(d.v, LatticePoint::from([1, 1]));
        assert_eq!(d.u, LatticePoint::from([-1, -1]));
        assert_eq!(d.k, 2);
        assert_eq!(reconstruct_by_matrix(&d, p(2, 1)), vec![0, 0]);

        let d = decode(&LatticePoint::from([1]), p(1, 2)).unwrap();
        assert_eq!(
            (d.v, d.k, d.u),
            (LatticePoint::from([1]), 0, LatticePoint::from([0]))
        );
        let d = decode(&LatticePoint::from([3]), p(1, 2)).unwrap();
        assert_eq!(
            (d.v, d.k, d.u),
            (LatticePoint::from([1]), 1, LatticePoint::from([0]))
        );
    }

    #[test]
    fn decode_rejects_wrong_dimension() {
        assert!(matches!(
            decode(&LatticePoint::from([1, 2]), p(3, 1)),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn color_examples() {
        let colors: Vec<usize> = (1..=5)
            .map(|t| color(&LatticePoint::from([t]), p(1, 2)).unwrap())
            .collect();
        assert_eq!(colors, vec![1, 1, 2, 2, 1]);
        assert_eq!(color(&LatticePoint::from([0, 0]), p(2, 1)).unwrap(), 3);
        for (n, m) in [(1, 1), (2, 2), (3, 2)] {
            let params = p(n, m);
            let base = ClusterId {
                k: 0,
                u: LatticePoint::origin(n),
            };
            for v in enumerate_cluster(&base, params).unwrap().iter() {
                assert_eq!(color(v, params).unwrap(), 1);
            }
        }
    }

    #[test]
    fn cluster_examples() {
        assert_eq!(
            cluster_of(&LatticePoint::from([0, 0]), p(2, 1)).unwrap(),
            ClusterId {
                k: 2,
                u: LatticePoint::from([-1, -1])
            }
        );
        assert_eq!(
            cluster_of(&LatticePoint::from([1]), p(1, 2)).unwrap(),
            ClusterId {
                k: 0,
                u: LatticePoint::from([0])
            }
        );
        assert_eq!(
            cluster_of(&LatticePoint::from([21]), p(1, 2)).unwrap(),
            ClusterId {
                k: 0,
                u: LatticePoint::from([5])
            }
        );
    }

    #[test]
    fn enumerate_examples() {
        let c = enumerate_cluster(
            &ClusterId {
                k: 0,
                u: LatticePoint::from([0]),
            },
            p(1, 2),
        )
        .unwrap();
        assert_eq!(
            c.iter().cloned().collect::<Vec<_>>(),
            vec![LatticePoint::from([1]), LatticePoint::from([2])]
        );
        let c = enumerate_cluster(
            &ClusterId {
                k: 0,
                u: LatticePoint::from([0, 0]),
            },
            p(2, 1),
        )
        .unwrap();
        assert_eq!(
            c.iter().cloned().collect::<Vec<_>>(),
            vec![LatticePoint::from([1, 1]), LatticePoint::from([1, 2])]
        );
        let c = enumerate_cluster(
            &ClusterId {
                k: 1,
                u: LatticePoint::from([2, -1, 0]),
            },
            p(3, 2),
        )
        .unwrap();
        assert_eq!(c.len(), 48);
        assert_eq!(p(3, 2).cluster_size(), 48);
        assert!(enumerate_cluster(
            &ClusterId {
                k: 4,
                u: LatticePoint::origin(3)
            },
            p(3, 2)
        )
        .is_err());
    }

    #[test]
    fn every_color_appears_in_a_large_box() {
        for (n, m) in [(1, 1), (1, 3), (2, 1), (2, 2), (3, 1)] {
            let params = p(n, m);
            let fact: i64 = (1..=n as i64).product();
            let side = (n as i64 + 1) * m * fact;
            let mut seen = std::collections::BTreeSet::new();
            let mut t = vec![0i64; n];
            loop {
                seen.insert(color(&LatticePoint(t.clone()), params).unwrap());
                let mut s = n;
                let done = loop {
                    if s == 0 {
                        break true;
                    }
                    s -= 1;
                    if t[s] + 1 < side {
                        t[s] += 1;
                        break false;
                    }
                    t[s] = 0;
                };
                if done {
                    break;
                }
            }
            assert_eq!(seen.len(), n + 1, "n={n} m={m}");
        }
    }

    proptest! {
        #[test]
        fn decode_reconstructs_and_colors_agree(
            (n, m, t) in (1usize..=4, 1i64..=4).prop_flat_map(|(n, m)| {
                (Just(n), Just(m), prop::collection::vec(-1000i64..1000, n))
            })
        ) {
            let params = p(n, m);
            let t = LatticePoint(t);
            let d = decode(&t, params).unwrap();
            prop_assert_eq!(reconstruct_by_matrix(&d, params), t.0.clone());
            prop_assert_eq!(reconstruct(&d, params), t.clone());
            for (i, vi) in d.v.coords().iter().enumerate() {
                prop_assert!(*vi >= 1 && *vi <= (i as i64 + 1) * m);
            }
            prop_assert!(d.k <= n);
            let id = cluster_of(&t, params).unwrap();
            prop_assert_eq!(color(&t, params).unwrap(), id.k + 1);
            let cluster = enumerate_cluster(&id, params).unwrap();
            prop_assert!(cluster.contains(&t));
        }

        #[test]
        fn clusters_are_connected_and_sized(
            n in 1usize..=3, m in 1i64..=3, k in 0usize..=3,
            u in prop::collection::vec(-5i64..5, 3)
        ) {
            let params = p(n, m);
            let id = ClusterId { k: k.min(n), u: LatticePoint(u[..n].to_vec()) };
            let c = enumerate_cluster(&id, params).unwrap();
            prop_assert_eq!(c.len() as u64, params.cluster_size());
            prop_assert!(is_one_connected(&c));
            for x in c.iter() {
                prop_assert_eq!(cluster_of(x, params).unwrap(), id.clone());
            }
        }

        #[test]
        fn same_color_neighbours_share_a_cluster(
            n in 1usize..=3, m in 1i64..=3,
            t in prop::collection::vec(-200i64..200, 3),
            off in prop::collection::vec(-3i64..=3, 3),
        ) {
            let params = p(n, m);
            let a = LatticePoint(t[..n].to_vec());
            let b = LatticePoint(t[..n].iter().zip(&off).map(|(x, o)| x + o).collect());
            let (ca, cb) = (cluster_of(&a, params).unwrap(), cluster_of(&b, params).unwrap());
            if linf(a.coords(), b.coords()) <= m as u64 && ca.k == cb.k {
                prop_assert_eq!(ca, cb);
            }
        }
    }
}
