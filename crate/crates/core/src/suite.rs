//! The verification suite run by `levelcross verify` and the acceptance
//! test target. Each check returns a [`CriterionReport`]; none of them
//! panics on failure.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::check::require_crossing;
use crate::coloring::{
    color, decode, enumerate_cluster, reconstruct, ClusterId, ColoringParams, Decode,
};
use crate::constants::{
    build_pair_witness, exhaustive_singleton_check, naive_singleton_exists, singleton_sufficient,
    DEFAULT_BUDGET,
};
use crate::continuous::{
    approximate_level_crossing, certify, field_crossing, prepare, refine_sequence, ContinuousFn,
};
use crate::discrete::{
    max_touching_gap, size_bound, solve, validate_condition, verify_discrete, SolveOptions,
};
use crate::error::{Error, Result};
use crate::functions;
use crate::gen;
use crate::grid::{cube_bounds, intersection_dim, CellLabeling, GridShape};
use crate::io::{emit_witness, WitnessRef};
use crate::lattice::{is_one_connected, LatticePoint};
use crate::steinhaus::{find_crossing, random_coloring, verify_chessboard};

pub const SEED: u64 = 0x1e7e_15e7;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub type Check = (u32, &'static str, fn() -> Result<String>);

pub const CRITERIA: [Check; 10] = [
    (1, "clustered-coloring partition", partition),
    (
        2,
        "cluster size, connectivity and separation",
        cluster_bounds,
    ),
    (3, "chessboard totality", chessboard_totality),
    (4, "value-set bound", value_set_bound),
    (5, "singleton sufficiency for n = 2", singleton_evidence),
    (
        6,
        "no singleton on the 7^3 labeling, pair found",
        pair_witness,
    ),
    (7, "level-crossing soundness", level_soundness),
    (8, "refinement behaviour", refinement),
    (9, "chessboard via distance fields", distance_fields),
    (10, "grid observations", grid_observations),
];

pub fn run(check: &Check) -> CriterionReport {
    let start = Instant::now();
    let outcome = check.2();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    CriterionReport {
        id: check.0,
        title: check.1,
        passed,
        detail,
        seconds,
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(run).collect()
}

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::TheoremViolation(msg.into()))
}

/// Dense indexing of the box `[-half, half]^n`.
struct Window {
    n: usize,
    half: i64,
    side: usize,
}

impl Window {
    fn new(n: usize, half: i64) -> Self {
        Window {
            n,
            half,
            side: (2 * half + 1) as usize,
        }
    }

    fn len(&self) -> usize {
        self.side.pow(self.n as u32)
    }

    fn index(&self, p: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for &c in p {
            if c.abs() > self.half {
                return None;
            }
            idx = idx * self.side + (c + self.half) as usize;
        }
        Some(idx)
    }

    fn point(&self, mut idx: usize) -> Vec<i64> {
        let mut p = vec![0i64; self.n];
        for s in (0..self.n).rev() {
            p[s] = (idx % self.side) as i64 - self.half;
            idx /= self.side;
        }
        p
    }
}

/// Every cluster id `(k, u)` with `u` in the box spanned by the decoded
/// ids of `window`, widened by 2 on each side.
fn candidate_clusters(window: &Window, params: ColoringParams) -> Result<Vec<ClusterId>> {
    let n = window.n;
    let (mut lo, mut hi) = (vec![i64::MAX; n], vec![i64::MIN; n]);
    for idx in 0..window.len() {
        let d = decode(&LatticePoint(window.point(idx)), params)?;
        for s in 0..n {
            lo[s] = lo[s].min(d.u.0[s] - 2);
            hi[s] = hi[s].max(d.u.0[s] + 2);
        }
    }
    let mut out = Vec::new();
    let mut u = lo.clone();
    loop {
        for k in 0..=n {
            out.push(ClusterId {
                k,
                u: LatticePoint(u.clone()),
            });
        }
        let mut s = n;
        loop {
            if s == 0 {
                return Ok(out);
            }
            s -= 1;
            if u[s] < hi[s] {
                u[s] += 1;
                break;
            }
            u[s] = lo[s];
        }
    }
}

fn all_params() -> impl Iterator<Item = ColoringParams> {
    (1..=3).flat_map(|n| (1..=3).map(move |m| ColoringParams::new(n, m).expect("valid")))
}

/// Decoding reconstructs every point of `[-50, 50]^n`; enumerating clusters
/// forward covers every point exactly once, by the decoded cluster.
pub fn partition() -> Result<String> {
    let mut points = 0usize;
    for params in all_params() {
        let (n, m) = (params.n(), params.m());
        let window = Window::new(n, 50);
        let ids = candidate_clusters(&window, params)?;
        let mut owner = vec![u32::MAX; window.len()];
        for (i, id) in ids.iter().enumerate() {
            for p in &enumerate_cluster(id, params)? {
                if let Some(idx) = window.index(p.coords()) {
                    if owner[idx] != u32::MAX {
                        return fail(format!("n={n} m={m}: {p:?} lies in two clusters"));
                    }
                    owner[idx] = i as u32;
                }
            }
        }
        for (idx, &o) in owner.iter().enumerate() {
            let t = LatticePoint(window.point(idx));
            if o == u32::MAX {
                return fail(format!("n={n} m={m}: {t:?} lies in no enumerated cluster"));
            }
            let d: Decode = decode(&t, params)?;
            if reconstruct(&d, params) != t {
                return fail(format!("n={n} m={m}: reconstruction of {t:?} failed"));
            }
            if d.v
                .coords()
                .iter()
                .enumerate()
                .any(|(i, &v)| v < 1 || v > (i as i64 + 1) * m)
            {
                return fail(format!("n={n} m={m}: v = {:?} outside the box", d.v));
            }
            let id = &ids[o as usize];
            if id.k != d.k || id.u != d.u {
                return fail(format!(
                    "n={n} m={m}: {t:?} decodes to another cluster than covers it"
                ));
            }
            if color(&t, params)? != d.k + 1 {
                return fail(format!(
                    "n={n} m={m}: color of {t:?} disagrees with its cluster"
                ));
            }
            points += 1;
        }
    }
    Ok(format!(
        "{points} points over 9 parameter pairs, every one in exactly one cluster"
    ))
}

/// Sizes, 1-connectivity and same-color separation of all clusters meeting
/// `[-30, 30]^n`.
pub fn cluster_bounds() -> Result<String> {
    let mut clusters = 0usize;
    for params in all_params() {
        let (n, m) = (params.n(), params.m());
        let margin = n as i64 * m + m + 2;
        let window = Window::new(n, 30 + margin);
        let ids = candidate_clusters(&window, params)?;
        let mut owner = vec![u32::MAX; window.len()];
        let mut touching = Vec::new();
        for (i, id) in ids.iter().enumerate() {
            let set = enumerate_cluster(id, params)?;
            let touches = set.iter().any(|p| p.coords().iter().all(|c| c.abs() <= 30));
            for p in &set {
                if let Some(idx) = window.index(p.coords()) {
                    owner[idx] = i as u32;
                }
            }
            if touches {
                if set.len() as u64 != params.cluster_size() {
                    return fail(format!(
                        "n={n} m={m}: cluster {id:?} has {} points",
                        set.len()
                    ));
                }
                if !is_one_connected(&set) {
                    return fail(format!("n={n} m={m}: cluster {id:?} is not 1-connected"));
                }
                touching.push((i, set));
            }
        }
        let offsets = crate::lattice::offsets_within(n, m);
        for (i, set) in &touching {
            let k = ids[*i].k;
            for p in set {
                for off in &offsets {
                    let q: Vec<i64> = p.coords().iter().zip(off).map(|(a, b)| a + b).collect();
                    let idx = window.index(&q).expect("margin covers the neighbourhood");
                    let o = owner[idx];
                    if o == u32::MAX {
                        return fail(format!("n={n} m={m}: {q:?} is not covered"));
                    }
                    if o as usize != *i && ids[o as usize].k == k {
                        return fail(format!(
                            "n={n} m={m}: clusters {:?} and {:?} of one color are within {m}",
                            ids[*i], ids[o as usize]
                        ));
                    }
                }
            }
        }
        clusters += touching.len();
    }
    Ok(format!(
        "{clusters} clusters: sizes n! m^n, 1-connected, same-color gaps >= m+1"
    ))
}

pub fn chessboard_totality() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut total = 0;
    for n in 2..=3 {
        for k in 2..=8 {
            let shape = GridShape::new(n, k)?;
            for _ in 0..1000 {
                let c = random_coloring(shape, n, &mut rng);
                let w = find_crossing(&c)?;
                verify_chessboard(&c, &w)?;
                if total % 97 == 0 {
                    let again = find_crossing(&c)?;
                    let (a, b) = (
                        emit_witness(WitnessRef::Chessboard(&w, shape)),
                        emit_witness(WitnessRef::Chessboard(&again, shape)),
                    );
                    if a != b {
                        return fail("find_crossing is not deterministic");
                    }
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} random colorings, every witness verified"))
}

const SOLVE_CASES: [(usize, usize); 5] = [(2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

pub fn value_set_bound() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst = Vec::new();
    for (n, m) in SOLVE_CASES {
        let mut largest = 0;
        for i in 0..500 {
            let shape = GridShape::new(n, 2 + i % 4)?;
            let l = gen::valid_labeling(shape, m, &mut rng);
            let w = solve(&l, m, SolveOptions::default())?;
            verify_discrete(&l, m, &w)?;
            if w.p.len() as u64 > size_bound(n, m) {
                return fail(format!(
                    "n={n} m={m}: |P| = {} exceeds the bound",
                    w.p.len()
                ));
            }
            largest = largest.max(w.p.len());
        }
        worst.push(format!(
            "(n={n},m={m}) max|P|={largest}<={}",
            size_bound(n, m)
        ));
    }
    Ok(format!("2500 labelings verified; {}", worst.join(", ")))
}

pub fn singleton_evidence() -> Result<String> {
    let mut parts = Vec::new();
    for k in 2..=3 {
        for m in 0..=1 {
            let r = exhaustive_singleton_check(k, m, 2, DEFAULT_BUDGET)?;
            if !r.all_verified() {
                return fail(format!(
                    "k={k} m={m}: {} of {} labelings verified, first failure {:?}",
                    r.verified, r.enumerated, r.counterexample
                ));
            }
            parts.push(format!("k={k} m={m}: {}", r.enumerated));
        }
    }
    Ok(format!(
        "all valid labelings admit a singleton crossing ({})",
        parts.join(", ")
    ))
}

pub fn pair_witness() -> Result<String> {
    let l = build_pair_witness();
    if singleton_sufficient(&l).is_some() || naive_singleton_exists(&l) {
        return fail("a single value crosses the 7^3 labeling");
    }
    let biggest = crate::grid::level_components(&l)
        .iter()
        .map(|c| c.cells.len())
        .max()
        .unwrap_or(0);
    if biggest > 6 {
        return fail(format!("a level component has {biggest} > 6 cells"));
    }
    let w = solve(&l, 0, SolveOptions::default())?;
    verify_discrete(&l, 0, &w)?;
    if w.p.len() != 2 {
        return fail(format!("|P| = {}, expected 2", w.p.len()));
    }
    Ok(format!(
        "no singleton; largest level component {biggest} cells; |P| = 2 with {} cells on axis {}",
        w.cells.len(),
        w.axis
    ))
}

fn level_functions() -> Result<Vec<ContinuousFn>> {
    Ok(vec![
        functions::projection(2)?,
        functions::linear(2)?,
        functions::quadratic()?,
        functions::sine_curve(2)?,
    ])
}

pub fn level_soundness() -> Result<String> {
    let mut parts = Vec::new();
    for f in level_functions()? {
        for eps in [0.1, 0.05] {
            let prep = prepare(&f, eps, 1)?;
            if !validate_condition(&prep.labeling, 0)?.is_empty() {
                return fail(format!(
                    "{} at {eps}: discretization violates the condition",
                    f.name()
                ));
            }
            let w = approximate_level_crossing(&f, eps)?;
            let c = certify(&f, &w)?;
            if c.bound() >= eps {
                return fail(format!(
                    "{} at {eps}: certified bound {} is not below epsilon",
                    f.name(),
                    c.bound()
                ));
            }
            require_crossing(&w.cells, w.axis, w.shape)?;
            parts.push(format!("{}@{eps}: {:.4}", f.name(), c.bound()));
        }
    }
    Ok(format!("certified bounds {}", parts.join(", ")))
}

pub fn refinement() -> Result<String> {
    let f = functions::linear(2)?;
    let r = refine_sequence(&f, 0.1, 4)?;
    for w in &r.witnesses {
        let c = certify(&f, w)?;
        if c.bound() >= w.epsilon {
            return fail(format!(
                "witness at {} certifies only {}",
                w.epsilon,
                c.bound()
            ));
        }
        require_crossing(&w.cells, w.axis, w.shape)?;
    }
    for (j, s) in r.steps.iter().enumerate() {
        if !s.consistent() {
            return fail(format!(
                "step {j}: drift {} exceeds {} with intersecting unions",
                s.drift, s.drift_limit
            ));
        }
    }
    let hd: Vec<String> = r
        .steps
        .iter()
        .map(|s| format!("{:.4}", s.hausdorff))
        .collect();
    let meet = r.steps.iter().filter(|s| s.unions_intersect).count();
    Ok(format!(
        "4 witnesses verified on axis {}; Hausdorff [{}]; {meet}/{} consecutive unions intersect",
        r.axis,
        hd.join(", "),
        r.steps.len()
    ))
}

pub fn distance_fields() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut attempts = [0usize; crate::continuous::FIELD_EPSILONS.len()];
    for (n, k) in [(3, 4), (2, 6)] {
        let shape = GridShape::new(n, k)?;
        for _ in 0..100 {
            let c = random_coloring(shape, n, &mut rng);
            let direct = find_crossing(&c)?;
            verify_chessboard(&c, &direct)?;
            let via = field_crossing(&c)?;
            verify_chessboard(&c, &via.witness)?;
            attempts[via.attempt] += 1;
        }
    }
    Ok(format!(
        "200 colorings, both routes verified; successes per epsilon attempt {attempts:?}"
    ))
}

pub fn grid_observations() -> Result<String> {
    let mut pairs = 0usize;
    for n in 1..=3 {
        for k in 1..=4 {
            let shape = GridShape::new(n, k)?;
            let cells: Vec<_> = shape.cells().collect();
            for a in &cells {
                let ba = cube_bounds(a, shape)?;
                for b in &cells {
                    let geometric = ba.intersection_dim(&cube_bounds(b, shape)?);
                    if intersection_dim(a, b, shape)? != geometric {
                        return fail(format!(
                            "intersection dimension of {a:?} and {b:?} disagrees"
                        ));
                    }
                    pairs += 1;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut witnesses = 0;
    for _ in 0..300 {
        let (n, k) = (rng.gen_range(2..=3), rng.gen_range(1..=6));
        let shape = GridShape::new(n, k)?;
        let c = random_coloring(shape, n, &mut rng);
        let w = find_crossing(&c)?;
        let m = rng.gen_range(0..n);
        let l = gen::valid_labeling(shape, m, &mut rng);
        let d = solve(&l, m, SolveOptions::default())?;
        for len in [w.cells.len(), d.cells.len()] {
            if len < k {
                return fail(format!("a witness on [{k}]^{n} has only {len} cells"));
            }
        }
        witnesses += 2;
    }

    let mut labelings = 0;
    for i in 0..500 {
        let (n, m) = SOLVE_CASES[i % SOLVE_CASES.len()];
        let shape = GridShape::new(n, 2 + i % 4)?;
        let l: CellLabeling = gen::walk_labeling(shape, m, &mut rng);
        if !validate_condition(&l, m)?.is_empty() {
            return fail("generator produced an invalid labeling");
        }
        let gap = max_touching_gap(&l);
        if gap > m as u64 + 1 {
            return fail(format!(
                "touching cells differ by {gap} > m + 1 = {}",
                m + 1
            ));
        }
        labelings += 1;
    }
    Ok(format!(
        "{pairs} cell pairs agree; {witnesses} witnesses have >= k cells; {labelings} labelings keep touching gaps <= m+1"
    ))
}
