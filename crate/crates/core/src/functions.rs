//! Built-in maps `I^n -> R^{n-1}` and a JSON format for piecewise
//! polynomial maps.
//!
//! Registry names accepted by [`by_name`]:
//!
//! | name | map | L | M |
//! |---|---|---|---|
//! | `projection` | `x -> (x_1, ..., x_{n-1})` | 1 | 1 |
//! | `linear` | `x -> (x_j - x_{j+1})_j` | 2 | 1 |
//! | `quadratic` | `x -> (x_1 - 1/2)^2 - x_2^2` (`n = 2`) | 5 | 3.25 |
//! | `sine-curve` | `x -> (dist((x_j, x_{j+1}), G))_j` | √2 | √2 |
//! | `polynomial:<terms>` | see [`parse_polynomial`] | Σ\|c\|·deg | Σ\|c\| |
//!
//! `G` is the closed graph of the piecewise curve with a wildly oscillating
//! middle part that accumulates on the segment `{1/4} x [1/4, 3/4]`. It is
//! replaced by a polyline: the oscillating part is sampled uniformly in
//! `u = 1/(x - 1/4)` for `u` in `[4, 100]` and the remainder, which lies
//! within `1/100` of the accumulation segment, is represented by that
//! segment. The distance to a polyline is exactly 1-Lipschitz in the
//! Euclidean norm, so the declared constants hold for the shipped map.

use serde::Deserialize;

use crate::continuous::ContinuousFn;
use crate::error::{Error, Result};

pub const REGISTRY: [&str; 5] = [
    "projection",
    "linear",
    "quadratic",
    "sine-curve",
    "polynomial:<terms>",
];

pub fn by_name(name: &str, n: usize) -> Result<ContinuousFn> {
    if n < 1 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if let Some(terms) = name.strip_prefix("polynomial:") {
        let p = parse_polynomial(terms, n)?;
        return p.into_fn(name);
    }
    match name {
        "projection" => projection(n),
        "linear" => linear(n),
        "quadratic" if n == 2 => quadratic(),
        "quadratic" => Err(Error::invalid("the quadratic is defined for n = 2 only")),
        "sine-curve" => sine_curve(n),
        _ => Err(Error::invalid(format!(
            "unknown function {name:?}; expected one of {}",
            REGISTRY.join(", ")
        ))),
    }
}

pub fn projection(n: usize) -> Result<ContinuousFn> {
    ContinuousFn::new("projection", n, 1.0, 1.0, |x, out| {
        out.copy_from_slice(&x[..out.len()])
    })
}

pub fn linear(n: usize) -> Result<ContinuousFn> {
    ContinuousFn::new("linear", n, 2.0, 1.0, |x, out| {
        for (j, o) in out.iter_mut().enumerate() {
            *o = x[j] - x[j + 1];
        }
    })
}

pub fn quadratic() -> Result<ContinuousFn> {
    Polynomial::new(
        2,
        vec![vec![
            Term::new(1.0, vec![2, 0]),
            Term::new(-1.0, vec![1, 0]),
            Term::new(0.25, vec![0, 0]),
            Term::new(-1.0, vec![0, 2]),
        ]],
    )?
    .into_fn("quadratic")
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(from = "Vec<f64>")]
pub struct Term {
    pub coef: f64,
    pub exps: Vec<u32>,
}

impl Term {
    pub fn new(coef: f64, exps: Vec<u32>) -> Self {
        Term { coef, exps }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.coef
            * x.iter()
                .zip(&self.exps)
                .map(|(v, &e)| v.powi(e as i32))
                .product::<f64>()
    }

    fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

// `[coef, e_1, ..., e_n]`
impl From<Vec<f64>> for Term {
    fn from(v: Vec<f64>) -> Self {
        let coef = v.first().copied().unwrap_or(0.0);
        Term {
            coef,
            exps: v.iter().skip(1).map(|&e| e as u32).collect(),
        }
    }
}

/// One polynomial per output coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    n: usize,
    outputs: Vec<Vec<Term>>,
}

impl Polynomial {
    pub fn new(n: usize, outputs: Vec<Vec<Term>>) -> Result<Self> {
        if outputs.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                got: outputs.len(),
            });
        }
        for t in outputs.iter().flatten() {
            if t.exps.len() != n {
                return Err(Error::invalid(format!(
                    "term has {} exponents, expected {n}",
                    t.exps.len()
                )));
            }
            if !t.coef.is_finite() {
                return Err(Error::invalid("coefficients must be finite"));
            }
        }
        Ok(Polynomial { n, outputs })
    }

    /// l∞ Lipschitz bound on `I^n`: `Σ |c| deg` per output, maximized.
    pub fn lipschitz(&self) -> f64 {
        self.outputs
            .iter()
            .map(|o| {
                o.iter()
                    .map(|t| t.coef.abs() * t.degree() as f64)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Bound on `|f|` over `I^n`: `Σ |c|` per output, maximized.
    pub fn bound(&self) -> f64 {
        self.outputs
            .iter()
            .map(|o| o.iter().map(|t| t.coef.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, terms) in out.iter_mut().zip(&self.outputs) {
            *o = terms.iter().map(|t| t.eval(x)).sum();
        }
    }

    pub fn into_fn(self, name: &str) -> Result<ContinuousFn> {
        // constants still need positive declared constants
        let l = self.lipschitz().max(1e-9);
        let m = self.bound().max(1e-9);
        ContinuousFn::new(name, self.n, l, m, move |x, out| self.eval_into(x, out))
    }
}

/// Parses `c@e1,...,en;c@...` with outputs separated by `|`; for example
/// `1@2,0;-1@1,0;0.25@0,0;-1@0,2` is `x1^2 - x1 + 1/4 - x2^2`.
pub fn parse_polynomial(text: &str, n: usize) -> Result<Polynomial> {
    let bad = |what: &str| Error::invalid(format!("bad polynomial term {what:?}"));
    let mut outputs = Vec::new();
    for part in text.split('|') {
        let mut terms = Vec::new();
        for term in part.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (c, e) = term.split_once('@').ok_or_else(|| bad(term))?;
            let coef: f64 = c.trim().parse().map_err(|_| bad(term))?;
            let exps = e
                .split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| bad(term)))
                .collect::<Result<Vec<_>>>()?;
            terms.push(Term::new(coef, exps));
        }
        outputs.push(terms);
    }
    Polynomial::new(n, outputs)
}

/// Piecewise polynomial map read from JSON:
///
/// ```json
/// {"n": 2, "lipschitz": 1.0, "bound": 1.0,
///  "pieces": [{"lo": [0, 0], "hi": [0.5, 1], "outputs": [[[1, 1, 0]]]},
///             {"lo": [0.5, 0], "hi": [1, 1], "outputs": [[[0.5, 0, 0]]]}]}
/// ```
///
/// Each term is `[coef, e_1, ..., e_n]`. A point uses the first piece whose
/// closed box contains it; points covered by no piece evaluate to 0. The
/// pieces are expected to agree on shared boundaries. `lipschitz` and
/// `bound` default to the largest per-piece polynomial bounds, which are
/// only valid for a continuous map.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseSpec {
    pub n: usize,
    #[serde(default)]
    pub lipschitz: Option<f64>,
    #[serde(default)]
    pub bound: Option<f64>,
    pub pieces: Vec<Piece>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub outputs: Vec<Vec<Term>>,
}

pub fn parse_piecewise(text: &str) -> Result<ContinuousFn> {
    let spec: PiecewiseSpec = serde_json::from_str(text).map_err(|e| {
        Error::schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let n = spec.n;
    if n == 0 {
        return Err(Error::schema("n", "dimension must be positive"));
    }
    if spec.pieces.is_empty() {
        return Err(Error::schema("pieces", "at least one piece is required"));
    }
    let mut pieces = Vec::with_capacity(spec.pieces.len());
    for (i, p) in spec.pieces.into_iter().enumerate() {
        if p.lo.len() != n || p.hi.len() != n {
            return Err(Error::schema(
                format!("pieces[{i}]"),
                format!("box corners must have {n} coordinates"),
            ));
        }
        let poly = Polynomial::new(n, p.outputs)
            .map_err(|e| Error::schema(format!("pieces[{i}].outputs"), e.to_string()))?;
        pieces.push((p.lo, p.hi, poly));
    }
    let l = spec.lipschitz.unwrap_or_else(|| {
        pieces
            .iter()
            .map(|(_, _, p)| p.lipschitz())
            .fold(0.0, f64::max)
            .max(1e-9)
    });
    let m = spec.bound.unwrap_or_else(|| {
        pieces
            .iter()
            .map(|(_, _, p)| p.bound())
            .fold(0.0, f64::max)
            .max(1e-9)
    });
    ContinuousFn::new("piecewise", n, l, m, move |x, out| {
        let hit = pieces.iter().find(|(lo, hi, _)| {
            x.iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b)
        });
        match hit {
            Some((_, _, p)) => p.eval_into(x, out),
            None => out.iter_mut().for_each(|o| *o = 0.0),
        }
    })
}

/// Polyline vertices approximating `G`, as one list per connected run.
pub fn sine_curve_polyline() -> Vec<Vec<[f64; 2]>> {
    let g_mid = |x: f64| 0.25 * (1.0 / (x - 0.25)).sin() + 0.5;
    let s4 = 0.5 * 4f64.sin() + 1.0;
    let g_right = |x: f64| -s4 * x + s4;

    let main = vec![[0.0, 1.0], [0.25, 0.5]];
    let mut osc = Vec::new();
    let (u_lo, u_hi, du) = (4.0, 100.0, 0.1);
    let steps = ((u_hi - u_lo) / du) as usize;
    for i in (0..=steps).rev() {
        let x = 0.25 + 1.0 / (u_lo + i as f64 * du);
        osc.push([x, g_mid(x)]);
    }
    osc.push([1.0, g_right(1.0)]);
    vec![main, osc, vec![[0.25, 0.25], [0.25, 0.75]]]
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    let (ex, ey) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
    (ex * ex + ey * ey).sqrt()
}

pub fn sine_curve(n: usize) -> Result<ContinuousFn> {
    if n < 2 {
        return Err(Error::invalid("the sine-curve map needs n >= 2"));
    }
    let runs = sine_curve_polyline();
    let segments: Vec<([f64; 2], [f64; 2])> = runs
        .iter()
        .flat_map(|r| r.windows(2).map(|w| (w[0], w[1])))
        .collect();
    let sqrt2 = std::f64::consts::SQRT_2;
    ContinuousFn::new("sine-curve", n, sqrt2, sqrt2, move |x, out| {
        for (j, o) in out.iter_mut().enumerate() {
            let p = [x[j], x[j + 1]];
            *o = segments
                .iter()
                .map(|&(a, b)| segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min);
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn registry_names() {
        for name in ["projection", "linear", "sine-curve"] {
            for n in 2..=3 {
                let f = by_name(name, n).unwrap();
                assert_eq!(f.out_dim(), n - 1);
            }
        }
        assert!(by_name("quadratic", 3).is_err());
        assert!(by_name("nope", 2).is_err());
        let f = by_name("polynomial:1@1,0|2@0,1", 2);
        assert!(matches!(f, Err(Error::DimensionMismatch { .. })));
        let f = by_name("polynomial:1@1,0;-1@0,1", 2).unwrap();
        assert_eq!(f.eval(&[0.75, 0.25]), vec![0.5]);
    }

    #[test]
    fn quadratic_values() {
        let f = quadratic().unwrap();
        assert!((f.eval(&[0.5, 0.0])[0]).abs() < 1e-15);
        assert!((f.eval(&[1.0, 1.0])[0] - (0.25 - 1.0)).abs() < 1e-15);
        assert_eq!(f.lipschitz(), 5.0);
        assert_eq!(f.bound(), 3.25);
    }

    // Spot checks of the declared constants on random pairs.
    #[test]
    fn declared_constants_hold_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for f in [
            projection(3).unwrap(),
            linear(3).unwrap(),
            quadratic().unwrap(),
            sine_curve(2).unwrap(),
        ] {
            let n = f.n();
            for _ in 0..2000 {
                let x: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
                let y: Vec<f64> = x
                    .iter()
                    .map(|v| (v + rng.gen_range(-0.05..0.05)).clamp(0.0, 1.0))
                    .collect();
                let (fx, fy) = (f.eval(&x), f.eval(&y));
                let dx = x
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let dv = fx
                    .iter()
                    .zip(&fy)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(dv <= f.lipschitz() * dx + 1e-12, "{}", f.name());
                assert!(fx.iter().all(|v| v.abs() <= f.bound()), "{}", f.name());
            }
        }
    }

    #[test]
    fn sine_curve_vanishes_on_its_pieces() {
        let f = sine_curve(2).unwrap();
        assert!(f.eval(&[0.0, 1.0])[0] < 1e-12);
        assert!(f.eval(&[0.125, 0.75])[0] < 1e-12);
        assert!(f.eval(&[0.25, 0.3])[0] < 1e-12);
        assert!(f.eval(&[1.0, 0.0])[0] < 1e-12);
        // a point on the exact curve is close to the polyline
        let x: f64 = 0.3;
        let y = 0.25 * (1.0 / (x - 0.25)).sin() + 0.5;
        assert!(f.eval(&[x, y])[0] < 1e-3);
        assert!(f.eval(&[0.9, 0.9])[0] > 0.3);
    }

    #[test]
    fn piecewise_spec() {
        let text = r#"{"n": 2, "pieces": [
            {"lo": [0, 0], "hi": [0.5, 1], "outputs": [[[1, 1, 0]]]},
            {"lo": [0.5, 0], "hi": [1, 1], "outputs": [[[0.5, 0, 0]]]}]}"#;
        let f = parse_piecewise(text).unwrap();
        assert_eq!(f.eval(&[0.25, 0.5]), vec![0.25]);
        assert_eq!(f.eval(&[0.75, 0.5]), vec![0.5]);
        assert_eq!(f.lipschitz(), 1.0);
        assert!(matches!(
            parse_piecewise(r#"{"n": 2, "pieces": []}"#),
            Err(Error::Schema { .. })
        ));
        assert!(matches!(
            parse_piecewise(r#"{"n": 2}"#),
            Err(Error::Schema { .. })
        ));
        let wrong = r#"{"n": 2, "pieces": [{"lo": [0], "hi": [1, 1], "outputs": [[[1, 1, 0]]]}]}"#;
        assert!(matches!(parse_piecewise(wrong), Err(Error::Schema { .. })));
    }
}
