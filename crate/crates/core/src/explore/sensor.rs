use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::grid::OccupancyGrid;

// Disk membership tolerance in squared cell units; keeps the world-coordinate
// test and the integer stencil in agreement on exact-boundary cells.
const DISK_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn of_cell(grid: &OccupancyGrid, idx: usize) -> Self {
        let (x, y) = grid.cell_center(idx);
        Self { x, y }
    }

    pub fn distance(&self, other: &Pose) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensorModel {
    /// Every cell whose centre lies within `radius` (world units).
    Disk { radius: f64 },
    /// `beam_count` evenly spaced rays of length `range`, each stopping at the first occupied cell.
    Beams { range: f64, beam_count: usize },
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SensorModel::Disk { radius } if !(radius.is_finite() && radius > 0.0) => {
                Err(Error::param(format!("sensor radius must be > 0, got {radius}")))
            }
            SensorModel::Beams { range, beam_count } if !(range > 0.0 && beam_count >= 1) => Err(
                Error::param(format!("beam model needs range > 0 and >= 1 beam (got {range}, {beam_count})")),
            ),
            _ => Ok(()),
        }
    }

    pub fn reach(&self) -> f64 {
        match *self {
            SensorModel::Disk { radius } => radius,
            SensorModel::Beams { range, .. } => range,
        }
    }
}

/// Circular goal area around a selected frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalRegion {
    pub center: Pose,
    pub radius: f64,
}

impl GoalRegion {
    pub fn new(center: Pose, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param(format!("goal radius must be > 0, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: &Pose) -> bool {
        self.center.distance(p) <= self.radius
    }
}

/// Cells observed from `at`. Beams stop at the first cell above `tau_ob`, which is included.
pub fn sensor_footprint(grid: &OccupancyGrid, at: Pose, model: &SensorModel, tau_ob: f64) -> Vec<usize> {
    let mut out = Vec::new();
    match *model {
        SensorModel::Disk { radius } => disk_cells(grid, at, radius, &mut out),
        SensorModel::Beams { range, beam_count } => {
            beam_cells(grid, at, range, beam_count, tau_ob, &mut out)
        }
    }
    out
}

/// Append the cells whose centres lie within `radius` of `at`, in row-major order.
pub fn disk_cells(grid: &OccupancyGrid, at: Pose, radius: f64, out: &mut Vec<usize>) {
    let res = grid.resolution();
    let (ox, oy) = grid.origin();
    // position in cell units, relative to cell centres
    let cx = (at.x - ox) / res - 0.5;
    let cy = (at.y - oy) / res - 0.5;
    let rc = radius / res;
    let r2 = rc * rc + DISK_SLACK;
    let row_lo = ((cy - rc).floor().max(0.0)) as usize;
    let row_hi = (cy + rc).ceil().min(grid.height() as f64 - 1.0);
    if row_hi < 0.0 {
        return;
    }
    let row_hi = row_hi as usize;
    for row in row_lo..=row_hi {
        let dy = row as f64 - cy;
        let rem = r2 - dy * dy;
        if rem < 0.0 {
            continue;
        }
        let half = rem.sqrt();
        let c_lo = (cx - half).ceil().max(0.0);
        let c_hi = (cx + half).floor().min(grid.width() as f64 - 1.0);
        if c_hi < c_lo {
            continue;
        }
        for col in c_lo as usize..=c_hi as usize {
            let dx = col as f64 - cx;
            if dx * dx + dy * dy <= r2 {
                out.push(row * grid.width() + col);
            }
        }
    }
}

fn beam_cells(
    grid: &OccupancyGrid,
    at: Pose,
    range: f64,
    beam_count: usize,
    tau_ob: f64,
    out: &mut Vec<usize>,
) {
    let Some(start) = grid.cell_at(at.x, at.y) else {
        return;
    };
    let (r0, c0) = grid.row_col(start);
    let (r0, c0) = (r0 as i64, c0 as i64);
    let steps = range / grid.resolution();
    for k in 0..beam_count {
        let theta = TAU * k as f64 / beam_count as f64;
        let c1 = c0 + (steps * theta.cos()).round() as i64;
        let r1 = r0 + (steps * theta.sin()).round() as i64;
        trace_line(grid, (r0, c0), (r1, c1), tau_ob, out);
    }
    out.sort_unstable();
    out.dedup();
}

// Bresenham traversal from `a` to `b`, stopping after the first blocked cell
// or at the grid edge.
fn trace_line(grid: &OccupancyGrid, a: (i64, i64), b: (i64, i64), tau_ob: f64, out: &mut Vec<usize>) {
    let (mut r, mut c) = a;
    let dr = (b.0 - a.0).abs();
    let dc = (b.1 - a.1).abs();
    let sr = if b.0 >= a.0 { 1 } else { -1 };
    let sc = if b.1 >= a.1 { 1 } else { -1 };
    let mut err = dc - dr;
    let (h, w) = (grid.height() as i64, grid.width() as i64);
    loop {
        if r < 0 || c < 0 || r >= h || c >= w {
            return;
        }
        let idx = (r * w + c) as usize;
        out.push(idx);
        if grid.get(idx) > tau_ob || (r, c) == b {
            return;
        }
        let e2 = 2 * err;
        if e2 > -dr {
            err -= dr;
            c += sc;
        }
        if e2 < dc {
            err += dc;
            r += sr;
        }
    }
}

/// Row spans of a disk centred on a cell, in cell offsets.
#[derive(Debug, Clone)]
pub(crate) struct DiskStencil {
    /// `(row offset, max |col offset|)` for each row the disk touches.
    spans: Vec<(isize, isize)>,
    cells: usize,
}

impl DiskStencil {
    pub(crate) fn new(radius: f64, resolution: f64) -> Self {
        let rc = radius / resolution;
        let r2 = rc * rc + DISK_SLACK;
        let reach = rc.floor() as isize + 1;
        let mut spans = Vec::new();
        let mut cells = 0;
        for dr in -reach..=reach {
            let rem = r2 - (dr * dr) as f64;
            if rem < 0.0 {
                continue;
            }
            let mut half = rem.sqrt().floor() as isize;
            while ((half + 1) * (half + 1) + dr * dr) as f64 <= r2 {
                half += 1;
            }
            while half >= 0 && (half * half + dr * dr) as f64 > r2 {
                half -= 1;
            }
            if half >= 0 {
                spans.push((dr, half));
                cells += (2 * half + 1) as usize;
            }
        }
        Self { spans, cells }
    }

    pub(crate) fn spans(&self) -> &[(isize, isize)] {
        &self.spans
    }

    /// Cell count of an unclipped disk.
    pub(crate) fn cells(&self) -> usize {
        self.cells
    }
}
