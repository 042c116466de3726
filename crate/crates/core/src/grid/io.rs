//! Text grid files and 8-bit PGM previews.
//!
//! Grid file layout:
//!
//! ```text
//! EIK-GRID nx ny h origin_x origin_y
//! v(0,0) v(1,0) ... v(nx-1,0)
//! ...
//! ```
//!
//! one line per grid row, values printed with 17 significant digits so a
//! write/read cycle is lossless.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};

use super::{Grid2D, ScalarField2D};

pub const GRID_TAG: &str = "EIK-GRID";

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn grid_to_string(field: &ScalarField2D) -> String {
    let g = field.grid();
    let mut s = String::with_capacity(g.len() * 24 + 64);
    let o = g.origin();
    let _ = writeln!(
        s,
        "{GRID_TAG} {} {} {} {} {}",
        g.nx(),
        g.ny(),
        fmt_f64(g.h()),
        fmt_f64(o[0]),
        fmt_f64(o[1])
    );
    for row in field.values().chunks(g.nx()) {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_grid(text: &str) -> Result<ScalarField2D> {
    let mut tokens = text.split_whitespace();
    let tag = tokens.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
    if tag != GRID_TAG {
        return Err(Error::Parse(format!("expected {GRID_TAG} header, found `{tag}`")));
    }
    let nx: usize = next_parsed(&mut tokens, "nx")?;
    let ny: usize = next_parsed(&mut tokens, "ny")?;
    let h: f64 = next_parsed(&mut tokens, "h")?;
    let ox: f64 = next_parsed(&mut tokens, "origin_x")?;
    let oy: f64 = next_parsed(&mut tokens, "origin_y")?;
    let grid = Grid2D::new(nx, ny, h, [ox, oy])?;
    let values = tokens
        .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad value `{t}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    ScalarField2D::new(grid, values)
}

pub(crate) fn next_parsed<'a, T: std::str::FromStr>(
    tokens: &mut impl Iterator<Item = &'a str>,
    what: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let t = tokens
        .next()
        .ok_or_else(|| Error::Parse(format!("missing header field {what}")))?;
    t.parse()
        .map_err(|e| Error::Parse(format!("bad header field {what} `{t}`: {e}")))
}

/// Binary (P5) PGM with min-max linear scaling; the top image row is the
/// largest `y`.
pub fn write_pgm<W: Write>(field: &ScalarField2D, mut out: W) -> Result<()> {
    let g = field.grid();
    let (lo, hi) = (field.min(), field.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    write!(out, "P5\n{} {}\n255\n", g.nx(), g.ny())?;
    let mut buf = Vec::with_capacity(g.len());
    for j in (0..g.ny()).rev() {
        for i in 0..g.nx() {
            let v = (field.at(i, j) - lo) / span;
            buf.push((v * 255.0).round().clamp(0.0, 255.0) as u8);
        }
    }
    out.write_all(&buf)?;
    Ok(())
}
