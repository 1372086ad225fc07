//! JSON formats for labelings and witnesses.
//!
//! A labeling is `{"n":N,"k":K,"d":D,"values":[[...],...]}` with `k^n`
//! value vectors of length `d` in row-major cell order (first axis most
//! significant). [`serialize_labeling`] writes exactly this compact form,
//! so canonical documents survive a parse/serialize round trip byte for
//! byte.
//!
//! Witness documents carry `kind`, `n`, `k`, `p`, `axis`, the sorted
//! `cells`, and `epsilon` or `bound` where they apply. Reals are written
//! with 17 significant digits, which round-trips every `f64`.

use std::fmt::Write as _;

use serde_json::Value;

use crate::continuous::ContinuousWitness;
use crate::discrete::DiscreteWitness;
use crate::error::{Error, Result};
use crate::grid::{CellIndex, CellLabeling, GridShape};
use crate::steinhaus::ChessboardWitness;

fn field<'a>(obj: &'a serde_json::Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::schema(name, "missing field"))
}

fn small_uint(obj: &serde_json::Map<String, Value>, name: &str) -> Result<usize> {
    field(obj, name)?
        .as_u64()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::schema(name, "expected a nonnegative integer"))
}

pub fn parse_labeling(text: &str) -> Result<CellLabeling> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        Error::schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::schema("$", "expected an object"))?;
    if let Some(extra) = obj
        .keys()
        .find(|k| !matches!(k.as_str(), "n" | "k" | "d" | "values"))
    {
        return Err(Error::schema(extra.as_str(), "unknown field"));
    }
    let n = small_uint(obj, "n")?;
    let k = small_uint(obj, "k")?;
    let d = small_uint(obj, "d")?;
    if n == 0 {
        return Err(Error::schema("n", "must be at least 1"));
    }
    if k == 0 {
        return Err(Error::schema("k", "must be at least 1"));
    }
    let shape = GridShape::new(n, k).map_err(|e| Error::schema("k", e.to_string()))?;
    let values = field(obj, "values")?
        .as_array()
        .ok_or_else(|| Error::schema("values", "expected an array"))?;
    if values.len() != shape.cell_count() {
        return Err(Error::schema(
            "values",
            format!(
                "expected k^n = {} entries, got {}",
                shape.cell_count(),
                values.len()
            ),
        ));
    }
    let mut flat = Vec::with_capacity(values.len() * d);
    for (i, v) in values.iter().enumerate() {
        let at = || format!("values[{i}]");
        let v = v
            .as_array()
            .ok_or_else(|| Error::schema(at(), "expected an array"))?;
        if v.len() != d {
            return Err(Error::schema(
                at(),
                format!("expected {d} coordinates, got {}", v.len()),
            ));
        }
        for (j, c) in v.iter().enumerate() {
            flat.push(c.as_i64().ok_or_else(|| {
                Error::schema(format!("values[{i}][{j}]"), "expected an integer")
            })?);
        }
    }
    CellLabeling::new(shape, d, flat)
}

pub fn serialize_labeling(l: &CellLabeling) -> String {
    let shape = l.shape();
    let mut out = format!(
        "{{\"n\":{},\"k\":{},\"d\":{},\"values\":[",
        shape.n(),
        shape.k(),
        l.dim()
    );
    for i in 0..shape.cell_count() {
        if i > 0 {
            out.push(',');
        }
        write_ints(&mut out, l.value(i));
    }
    out.push_str("]}");
    out
}

fn write_ints<T: std::fmt::Display>(out: &mut String, v: &[T]) {
    out.push('[');
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x}");
    }
    out.push(']');
}

/// `{:.16e}`: one leading digit and 16 decimals.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_cells(out: &mut String, cells: &[CellIndex]) {
    let mut sorted: Vec<&CellIndex> = cells.iter().collect();
    sorted.sort();
    out.push('[');
    for (i, c) in sorted.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_ints(out, &c.0);
    }
    out.push(']');
}

#[derive(Clone, Copy, Debug)]
pub enum WitnessRef<'a> {
    Chessboard(&'a ChessboardWitness, GridShape),
    Discrete(&'a DiscreteWitness, GridShape),
    Continuous(&'a ContinuousWitness),
}

pub fn emit_witness(w: WitnessRef<'_>) -> String {
    let (kind, shape) = match w {
        WitnessRef::Chessboard(_, s) => ("chessboard", s),
        WitnessRef::Discrete(_, s) => ("discrete", s),
        WitnessRef::Continuous(c) => ("continuous", c.shape),
    };
    let mut out = format!(
        "{{\"kind\":\"{kind}\",\"n\":{},\"k\":{},\"p\":",
        shape.n(),
        shape.k()
    );
    match w {
        WitnessRef::Chessboard(c, _) => {
            let _ = write!(out, "{}", c.color);
            let _ = write!(out, ",\"axis\":{},\"cells\":", c.axis);
            write_cells(&mut out, &c.cells);
        }
        WitnessRef::Discrete(d, _) => {
            out.push('[');
            for (i, p) in d.p.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_ints(&mut out, p.coords());
            }
            out.push(']');
            let _ = write!(out, ",\"axis\":{},\"cells\":", d.axis);
            write_cells(&mut out, &d.cells);
            let _ = write!(out, ",\"bound\":{}", d.bound);
        }
        WitnessRef::Continuous(c) => {
            let reals: Vec<String> = c.p.iter().map(|&x| format_real(x)).collect();
            write_ints(&mut out, &reals);
            let _ = write!(out, ",\"axis\":{},\"cells\":", c.axis);
            write_cells(&mut out, &c.cells);
            let _ = write!(out, ",\"epsilon\":{}", format_real(c.epsilon));
        }
    }
    out.push('}');
    out
}
