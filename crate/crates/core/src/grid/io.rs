//! Text serialization of occupancy grids.
//!
//! Native format:
//!
//! ```text
//! bex-grid 1
//! width 3
//! height 2
//! resolution 0.1
//! origin 0 0
//! scale prob
//! data
//! 0 0.5 1
//! 0.25 0.5 0.75
//! ```
//!
//! `scale percent` stores values in 0..=100. ASCII PGM (`P2`) maps are also
//! accepted and are always read as percent; PGM carries no resolution, so the
//! caller supplies one.

use std::fmt::Write as _;

use super::OccupancyGrid;
use crate::error::{Error, Result};

pub const GRID_FORMAT_ID: &str = "bex-grid 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Prob,
    Percent,
}

impl GridScale {
    fn factor(self) -> f64 {
        match self {
            GridScale::Prob => 1.0,
            GridScale::Percent => 100.0,
        }
    }
}

/// Parse either the native format or an ASCII PGM.
pub fn read_grid(text: &str, pgm_resolution: f64) -> Result<OccupancyGrid> {
    let first = text.split_whitespace().next().unwrap_or("");
    if first == "P2" {
        read_pgm(text, pgm_resolution)
    } else {
        read_native(text)
    }
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn read_native(text: &str) -> Result<OccupancyGrid> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    if lines.next() != Some(GRID_FORMAT_ID) {
        return Err(fmt_err(format!("missing '{GRID_FORMAT_ID}' header")));
    }
    let (mut width, mut height, mut resolution) = (None, None, None);
    let mut origin = (0.0, 0.0);
    let mut scale = GridScale::Prob;
    let num = |s: Option<&str>, key: &str| -> Result<f64> {
        s.ok_or_else(|| fmt_err(format!("'{key}' needs a value")))?
            .parse::<f64>()
            .map_err(|_| fmt_err(format!("bad value for '{key}'")))
    };
    loop {
        let line = lines.next().ok_or_else(|| fmt_err("missing 'data' section"))?;
        let mut it = line.split_whitespace();
        let key = it.next().unwrap_or("");
        match key {
            "data" => break,
            "width" => width = Some(num(it.next(), key)? as usize),
            "height" => height = Some(num(it.next(), key)? as usize),
            "resolution" => resolution = Some(num(it.next(), key)?),
            "origin" => origin = (num(it.next(), key)?, num(it.next(), key)?),
            "scale" => {
                scale = match it.next() {
                    Some("prob") => GridScale::Prob,
                    Some("percent") => GridScale::Percent,
                    other => return Err(fmt_err(format!("unknown scale {other:?}"))),
                }
            }
            other => return Err(fmt_err(format!("unknown header key '{other}'"))),
        }
    }
    let width = width.ok_or_else(|| fmt_err("missing width"))?;
    let height = height.ok_or_else(|| fmt_err("missing height"))?;
    let resolution = resolution.ok_or_else(|| fmt_err("missing resolution"))?;
    let mut cells = Vec::with_capacity(width * height);
    for line in lines {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| fmt_err(format!("bad cell value '{tok}'")))?;
            cells.push(v / scale.factor());
        }
    }
    if cells.len() != width * height {
        return Err(fmt_err(format!(
            "expected {} cells, found {}",
            width * height,
            cells.len()
        )));
    }
    OccupancyGrid::new(width, height, resolution, origin, cells)
}

fn read_pgm(text: &str, resolution: f64) -> Result<OccupancyGrid> {
    let mut toks = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    toks.next(); // P2
    let mut int = |what: &str| -> Result<u64> {
        toks.next()
            .ok_or_else(|| fmt_err(format!("PGM missing {what}")))?
            .parse::<u64>()
            .map_err(|_| fmt_err(format!("PGM bad {what}")))
    };
    let width = int("width")? as usize;
    let height = int("height")? as usize;
    let maxval = int("maxval")?;
    if maxval > 100 {
        return Err(fmt_err(format!("PGM maxval {maxval} exceeds percent scale")));
    }
    let mut cells = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        cells.push(int("pixel")? as f64 / 100.0);
    }
    OccupancyGrid::new(width, height, resolution, (0.0, 0.0), cells)
}

/// Native-format text with one grid row per line.
pub fn write_grid(grid: &OccupancyGrid, scale: GridScale) -> String {
    let mut out = String::with_capacity(grid.len() * 4 + 128);
    let scale_name = match scale {
        GridScale::Prob => "prob",
        GridScale::Percent => "percent",
    };
    let _ = writeln!(out, "{GRID_FORMAT_ID}");
    let _ = writeln!(out, "width {}", grid.width());
    let _ = writeln!(out, "height {}", grid.height());
    let _ = writeln!(out, "resolution {}", grid.resolution());
    let _ = writeln!(out, "origin {} {}", grid.origin().0, grid.origin().1);
    let _ = writeln!(out, "scale {scale_name}");
    out.push_str("data\n");
    for row in grid.cells().chunks(grid.width()) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", v * scale.factor());
        }
        out.push('\n');
    }
    out
}
