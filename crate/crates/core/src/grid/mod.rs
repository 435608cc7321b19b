//! Occupancy grids, cell masks and the map-partition primitives used by frontier extraction.
//!
//! Cells are stored row-major. Row 0 is the top of the map (smallest `y`),
//! column 0 the left edge (smallest `x`). World coordinates of a cell centre
//! are `origin + (col + 0.5, row + 0.5) * resolution`.

mod io;

pub use io::{read_grid, write_grid, GridScale};

use crate::error::{Error, Result};

/// Values within this of 0.5 count as unknown.
pub const UNKNOWN_TOLERANCE: f64 = 1e-12;
/// Differences at or below this count as zero gradient.
pub const GRADIENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: (f64, f64),
    cells: Vec<f64>,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: (f64, f64),
        cells: Vec<f64>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param("grid dimensions must be positive"));
        }
        if cells.len() != width * height {
            return Err(Error::param(format!(
                "{}x{} grid needs {} cells, got {}",
                width,
                height,
                width * height,
                cells.len()
            )));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::param(format!("resolution must be > 0, got {resolution}")));
        }
        if let Some(v) = cells.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param(format!("cell value {v} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            resolution,
            origin,
            cells,
        })
    }

    pub fn filled(width: usize, height: usize, resolution: f64, value: f64) -> Result<Self> {
        Self::new(width, height, resolution, (0.0, 0.0), vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.cells[idx]
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.width + col]
    }

    /// Set a cell, clamping into `[0, 1]`.
    pub fn set(&mut self, idx: usize, value: f64) {
        self.cells[idx] = value.clamp(0.0, 1.0);
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn row_col(&self, idx: usize) -> (usize, usize) {
        (idx / self.width, idx % self.width)
    }

    /// World coordinates of the centre of cell `idx`.
    pub fn cell_center(&self, idx: usize) -> (f64, f64) {
        let (r, c) = self.row_col(idx);
        (
            self.origin.0 + (c as f64 + 0.5) * self.resolution,
            self.origin.1 + (r as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell containing world point `(x, y)`, if inside the grid.
    pub fn cell_at(&self, x: f64, y: f64) -> Option<usize> {
        let fc = ((x - self.origin.0) / self.resolution).floor();
        let fr = ((y - self.origin.1) / self.resolution).floor();
        if fc < 0.0 || fr < 0.0 || fc >= self.width as f64 || fr >= self.height as f64 {
            return None;
        }
        Some(self.index(fr as usize, fc as usize))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.cell_at(x, y).is_some()
    }

    /// World extent `(x_max, y_max)` of the far corner.
    pub fn extent(&self) -> (f64, f64) {
        (
            self.origin.0 + self.width as f64 * self.resolution,
            self.origin.1 + self.height as f64 * self.resolution,
        )
    }

    pub fn same_shape(&self, other: &OccupancyGrid) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// A set of cells of a `width x height` grid, stored as a dense mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl CellMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn for_grid(grid: &OccupancyGrid) -> Self {
        Self::empty(grid.width, grid.height)
    }

    pub fn from_indices(width: usize, height: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::empty(width, height);
        for i in indices {
            m.bits[i] = true;
        }
        m
    }

    pub fn from_fn(grid: &OccupancyGrid, f: impl Fn(f64) -> bool) -> Self {
        Self {
            width: grid.width,
            height: grid.height,
            bits: grid.cells.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    pub fn insert(&mut self, idx: usize) {
        self.bits[idx] = true;
    }

    pub fn remove(&mut self, idx: usize) {
        self.bits[idx] = false;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// Member indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.indices().collect()
    }

    fn zip(&self, other: &CellMask, f: impl Fn(bool, bool) -> bool) -> CellMask {
        assert_eq!((self.width, self.height), (other.width, other.height));
        CellMask {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &CellMask) -> CellMask {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &CellMask) -> CellMask {
        self.zip(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &CellMask) -> CellMask {
        self.zip(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &CellMask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Unknown, uncertain and known space, plus the free and occupied subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPartition {
    pub unknown: CellMask,
    pub uncertain: CellMask,
    pub known: CellMask,
    pub free: CellMask,
    pub occupied: CellMask,
}

/// Split `grid` by occupancy value.
///
/// Unknown cells sit at exactly 0.5; known cells are within `eps_known` of 0
/// or 1; everything else is uncertain. Free and occupied are drawn from known
/// and uncertain cells below `tau_fs` and above `tau_ob`.
pub fn partition(grid: &OccupancyGrid, tau_fs: f64, tau_ob: f64, eps_known: f64) -> Result<GridPartition> {
    check_thresholds(tau_fs, tau_ob)?;
    if !(0.0..0.5).contains(&eps_known) {
        return Err(Error::param(format!("eps_known must lie in [0, 0.5), got {eps_known}")));
    }
    let n = grid.len();
    let mut p = GridPartition {
        unknown: CellMask::for_grid(grid),
        uncertain: CellMask::for_grid(grid),
        known: CellMask::for_grid(grid),
        free: CellMask::for_grid(grid),
        occupied: CellMask::for_grid(grid),
    };
    for i in 0..n {
        let v = grid.cells[i];
        if (v - 0.5).abs() <= UNKNOWN_TOLERANCE {
            p.unknown.bits[i] = true;
            continue;
        }
        if v <= eps_known || v >= 1.0 - eps_known {
            p.known.bits[i] = true;
        } else {
            p.uncertain.bits[i] = true;
        }
        if v < tau_fs {
            p.free.bits[i] = true;
        }
        if v > tau_ob {
            p.occupied.bits[i] = true;
        }
    }
    Ok(p)
}

pub(crate) fn check_thresholds(tau_fs: f64, tau_ob: f64) -> Result<()> {
    if !(0.0 < tau_fs && tau_fs <= tau_ob && tau_ob < 1.0) {
        return Err(Error::param(format!(
            "thresholds must satisfy 0 < tau_fs <= tau_ob < 1 (got {tau_fs}, {tau_ob})"
        )));
    }
    Ok(())
}

/// Cells whose value differs from at least one in-grid 4-neighbour.
///
/// Equivalently, cells where the forward or backward difference along either
/// axis is non-zero; at borders only the in-grid side exists.
pub fn gradient_nonzero(grid: &OccupancyGrid) -> CellMask {
    let (w, h) = (grid.width, grid.height);
    let c = &grid.cells;
    let mut mask = CellMask::for_grid(grid);
    for r in 0..h {
        for col in 0..w {
            let i = r * w + col;
            let v = c[i];
            let differs = |j: usize| (c[j] - v).abs() > GRADIENT_EPS;
            let flagged = (col > 0 && differs(i - 1))
                || (col + 1 < w && differs(i + 1))
                || (r > 0 && differs(i - w))
                || (r + 1 < h && differs(i + w));
            mask.bits[i] = flagged;
        }
    }
    mask
}

/// Odd square kernel of non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    side: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(side: usize, weights: Vec<f64>) -> Result<Self> {
        if side % 2 == 0 {
            return Err(Error::param(format!("kernel side must be odd, got {side}")));
        }
        if weights.len() != side * side {
            return Err(Error::param("kernel weights do not match its side length"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::param("kernel weights must be finite and non-negative"));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(Error::param("kernel needs at least one positive weight"));
        }
        Ok(Self { side, weights })
    }

    pub fn ones(side: usize) -> Result<Self> {
        Self::new(side, vec![1.0; side * side])
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.side + col]
    }

    /// Offsets `(drow, dcol)` from the centre with positive weight.
    pub fn support(&self) -> Vec<(isize, isize)> {
        let half = (self.side / 2) as isize;
        let mut out = Vec::new();
        for r in 0..self.side {
            for c in 0..self.side {
                if self.weight(r, c) > 0.0 {
                    out.push((r as isize - half, c as isize - half));
                }
            }
        }
        out
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::ones(3).expect("3x3 ones kernel is valid")
    }
}

/// Cells at which the kernel, centred there, covers at least one mask cell
/// with positive weight. Out-of-grid positions never count as mask cells.
pub fn convolve_binary(mask: &CellMask, kernel: &Kernel) -> CellMask {
    let (w, h) = (mask.width as isize, mask.height as isize);
    let support = kernel.support();
    let mut out = CellMask::empty(mask.width, mask.height);
    // Each mask cell m is covered from centre c whenever m = c + offset.
    for m in mask.indices() {
        let (mr, mc) = ((m / mask.width) as isize, (m % mask.width) as isize);
        for &(dr, dc) in &support {
            let (r, c) = (mr - dr, mc - dc);
            if r >= 0 && r < h && c >= 0 && c < w {
                out.bits[(r * w + c) as usize] = true;
            }
        }
    }
    out
}
