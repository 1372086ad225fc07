//! SVG figures of 2-dimensional grids and level crossings, and PPM layer
//! stacks for 3-dimensional grids.
//!
//! SVG conventions: axis 1 runs left to right, axis 2 bottom to top. Cells
//! are `rect.cell`, witness outlines `rect.witness`, level band pixels
//! `rect.band`, and the crossing axis is labeled by `text.axis`.

use std::fmt::Write as _;

use crate::continuous::{ContinuousFn, ContinuousWitness};
use crate::error::{Error, Result};
use crate::grid::{CellIndex, CellLabeling, GridShape};

#[derive(Clone, Copy, Debug)]
pub struct SvgOptions {
    /// Side of the drawn unit square, in pixels.
    pub size: f64,
    /// Raster resolution of the level band in [`render_levelset_svg`].
    pub band_resolution: usize,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            size: 480.0,
            band_resolution: 160,
        }
    }
}

/// Witness cells and the axis they cross.
#[derive(Clone, Copy, Debug)]
pub struct Overlay<'a> {
    pub cells: &'a [CellIndex],
    pub axis: usize,
}

const PALETTE: [[u8; 3]; 8] = [
    [0x4e, 0x79, 0xa7],
    [0xf2, 0x8e, 0x2b],
    [0x59, 0xa1, 0x4f],
    [0xe1, 0x57, 0x59],
    [0x76, 0xb7, 0xb2],
    [0xed, 0xc9, 0x48],
    [0xb0, 0x7a, 0xa1],
    [0xff, 0x9d, 0xa7],
];

/// Deterministic fill for a value vector.
pub fn value_color(value: &[i64]) -> [u8; 3] {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &v in value {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    PALETTE[(h % PALETTE.len() as u64) as usize]
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn require_planar(shape: GridShape) -> Result<()> {
    if shape.n() != 2 {
        return Err(Error::UnsupportedDimension(shape.n()));
    }
    Ok(())
}

fn header(out: &mut String, size: f64) {
    let total = size + 40.0;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="-20 -20 {total} {total}">"#
    );
}

fn axis_label(out: &mut String, size: f64, axis: usize) {
    let (x, y) = if axis == 1 {
        (size / 2.0, size + 16.0)
    } else {
        (-6.0, size / 2.0)
    };
    let anchor = if axis == 1 { "middle" } else { "end" };
    let _ = writeln!(
        out,
        r#"<text class="axis" x="{x}" y="{y}" font-size="12" text-anchor="{anchor}">crosses axis {axis}</text>"#
    );
}

/// Horizontal runs `(row, start, len)` of a set of cells of a `k x k` grid,
/// with rows counted from the top of the picture.
fn runs(cells: &[CellIndex], k: usize) -> Vec<(usize, usize, usize)> {
    let mut by_row: Vec<Vec<usize>> = vec![Vec::new(); k];
    for c in cells {
        by_row[k - c.0[1] as usize].push(c.0[0] as usize - 1);
    }
    let mut out = Vec::new();
    for (row, mut xs) in by_row.into_iter().enumerate() {
        xs.sort_unstable();
        xs.dedup();
        let mut i = 0;
        while i < xs.len() {
            let mut j = i;
            while j + 1 < xs.len() && xs[j + 1] == xs[j] + 1 {
                j += 1;
            }
            out.push((row, xs[i], j - i + 1));
            i = j + 1;
        }
    }
    out
}

/// One `rect.cell` per cell and, with an overlay, one `rect.witness` per
/// witness cell.
pub fn render_grid_svg(
    labeling: &CellLabeling,
    overlay: Option<Overlay<'_>>,
    opts: &SvgOptions,
) -> Result<String> {
    let shape = labeling.shape();
    require_planar(shape)?;
    let k = shape.k();
    let s = opts.size / k as f64;
    let mut out = String::new();
    header(&mut out, opts.size);
    out.push_str("<g class=\"cells\">\n");
    for (l, cell) in shape.cells().enumerate() {
        let (x, y) = (
            (cell.0[0] - 1) as f64 * s,
            (k - cell.0[1] as usize) as f64 * s,
        );
        let _ = writeln!(
            out,
            r##"<rect class="cell" x="{x}" y="{y}" width="{s}" height="{s}" fill="{}" stroke="#ffffff" stroke-width="0.5"/>"##,
            hex(value_color(labeling.value(l)))
        );
    }
    out.push_str("</g>\n");
    if let Some(ov) = overlay {
        for c in ov.cells {
            shape.check(c)?;
        }
        out.push_str("<g class=\"witness\">\n");
        for cell in ov.cells {
            let (x, y) = (
                (cell.0[0] - 1) as f64 * s,
                (k - cell.0[1] as usize) as f64 * s,
            );
            let _ = writeln!(
                out,
                r##"<rect class="witness" x="{x}" y="{y}" width="{s}" height="{s}" fill="none" stroke="#000000" stroke-width="2"/>"##
            );
        }
        out.push_str("</g>\n");
        axis_label(&mut out, opts.size, ov.axis);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// The witness cells of a level crossing (merged into horizontal runs) over
/// a raster of the band `{x : |f(x) - p| < epsilon}`.
pub fn render_levelset_svg(
    f: &ContinuousFn,
    w: &ContinuousWitness,
    opts: &SvgOptions,
) -> Result<String> {
    require_planar(w.shape)?;
    if f.n() != 2 {
        return Err(Error::UnsupportedDimension(f.n()));
    }
    let size = opts.size;
    let mut out = String::new();
    header(&mut out, size);
    let _ = writeln!(
        out,
        r##"<rect class="frame" x="0" y="0" width="{size}" height="{size}" fill="#ffffff" stroke="#000000"/>"##
    );

    let r = opts.band_resolution.max(1);
    let px = size / r as f64;
    out.push_str("<g class=\"band\">\n");
    let mut band = Vec::new();
    for i in 1..=r as u32 {
        for j in 1..=r as u32 {
            let x = [(i as f64 - 0.5) / r as f64, (j as f64 - 0.5) / r as f64];
            let v = f.eval(&x);
            let d = v
                .iter()
                .zip(&w.p)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d < w.epsilon {
                band.push(CellIndex(vec![i, j]));
            }
        }
    }
    for (row, start, len) in runs(&band, r) {
        let _ = writeln!(
            out,
            r##"<rect class="band" x="{}" y="{}" width="{}" height="{px}" fill="#9ecae1"/>"##,
            start as f64 * px,
            row as f64 * px,
            len as f64 * px
        );
    }
    out.push_str("</g>\n<g class=\"witness\">\n");
    let k = w.shape.k();
    let s = size / k as f64;
    for (row, start, len) in runs(&w.cells, k) {
        let _ = writeln!(
            out,
            r##"<rect class="witness" x="{}" y="{}" width="{}" height="{s}" fill="#08519c" fill-opacity="0.6"/>"##,
            start as f64 * s,
            row as f64 * s,
            len as f64 * s
        );
    }
    out.push_str("</g>\n");
    axis_label(&mut out, size, w.axis);
    out.push_str("</svg>\n");
    Ok(out)
}

/// One binary PPM per layer along axis 3 (layer `i` holds the cells with
/// third index `i`). Witness cells get a black border.
pub fn render_ppm_layers(
    labeling: &CellLabeling,
    overlay: Option<Overlay<'_>>,
    cell_px: usize,
) -> Result<Vec<Vec<u8>>> {
    let shape = labeling.shape();
    if shape.n() != 3 {
        return Err(Error::UnsupportedDimension(shape.n()));
    }
    let k = shape.k();
    let px = cell_px.max(3);
    let side = k * px;
    let marked: std::collections::HashSet<&CellIndex> = overlay
        .map(|o| o.cells.iter().collect())
        .unwrap_or_default();
    let mut layers = Vec::with_capacity(k);
    for layer in 1..=k as u32 {
        let mut img = format!("P6\n{side} {side}\n255\n").into_bytes();
        for y in 0..side {
            let i2 = (k - y / px) as u32;
            for x in 0..side {
                let i1 = (x / px + 1) as u32;
                let cell = CellIndex(vec![i1, i2, layer]);
                let (dx, dy) = (x % px, y % px);
                let border = dx == 0 || dy == 0 || dx == px - 1 || dy == px - 1;
                let rgb = if border && marked.contains(&cell) {
                    [0, 0, 0]
                } else {
                    value_color(labeling.value_at(&cell))
                };
                img.extend_from_slice(&rgb);
            }
        }
        layers.push(img);
    }
    Ok(layers)
}
