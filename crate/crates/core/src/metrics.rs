//! Map-level progress measures against a ground truth.

use crate::entropy::neg_xlnx;
use crate::error::{Error, Result};
use crate::grid::OccupancyGrid;

/// Cells within this distance of the ground truth count as correct.
pub const AREA_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completion {
    pub shannon_remaining: f64,
    pub pct_entropy_complete: f64,
    pub pct_area_correct: f64,
}

/// Per-cell Bernoulli Shannon entropy in nats.
pub fn cell_shannon(p: f64) -> f64 {
    neg_xlnx(p) + neg_xlnx(1.0 - p)
}

pub fn map_shannon_entropy(grid: &OccupancyGrid) -> f64 {
    grid.cells().iter().map(|&p| cell_shannon(p)).sum()
}

/// Fraction of cells within [`AREA_TOLERANCE`] of `truth`.
pub fn area_correct(grid: &OccupancyGrid, truth: &OccupancyGrid) -> Result<f64> {
    check_shape(grid, truth)?;
    Ok(area_fraction(grid.cells(), truth.cells()))
}

pub(crate) fn area_fraction(cells: &[f64], truth: &[f64]) -> f64 {
    let ok = cells
        .iter()
        .zip(truth)
        .filter(|(a, b)| (*a - *b).abs() <= AREA_TOLERANCE)
        .count();
    ok as f64 / cells.len() as f64
}

/// Fraction of the initial entropy removed; 1 when there was none to remove.
pub fn entropy_fraction(remaining: f64, initial: f64) -> f64 {
    if initial > 0.0 {
        1.0 - remaining / initial
    } else {
        1.0
    }
}

pub fn completion_metrics(current: &OccupancyGrid, initial_entropy: f64, truth: &OccupancyGrid) -> Result<Completion> {
    check_shape(current, truth)?;
    let remaining = map_shannon_entropy(current);
    Ok(Completion {
        shannon_remaining: remaining,
        pct_entropy_complete: entropy_fraction(remaining, initial_entropy),
        pct_area_correct: area_fraction(current.cells(), truth.cells()),
    })
}

fn check_shape(a: &OccupancyGrid, b: &OccupancyGrid) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(Error::param(format!(
            "grid shapes differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> (OccupancyGrid, OccupancyGrid) {
        let truth = OccupancyGrid::new(4, 1, 1.0, (0.0, 0.0), vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let init = OccupancyGrid::new(4, 1, 1.0, (0.0, 0.0), vec![0.3, 0.6, 0.01, 0.9]).unwrap();
        (truth, init)
    }

    #[test]
    fn unchanged_map_is_zero_percent() {
        let (truth, init) = pair();
        let h0 = map_shannon_entropy(&init);
        let c = completion_metrics(&init, h0, &truth).unwrap();
        assert_eq!(c.pct_entropy_complete, 0.0);
        assert_eq!(c.pct_area_correct, 0.25);
    }

    #[test]
    fn truth_is_complete() {
        let (truth, init) = pair();
        let c = completion_metrics(&truth, map_shannon_entropy(&init), &truth).unwrap();
        assert_eq!(c.pct_entropy_complete, 1.0);
        assert_eq!(c.pct_area_correct, 1.0);
        assert_eq!(c.shannon_remaining, 0.0);
    }

    #[test]
    fn halved_entropy_is_half_complete() {
        // every cell at 0.5 carries ln 2; solve H(p) = ln2 / 2 by bisection
        let target = std::f64::consts::LN_2 / 2.0;
        let (mut lo, mut hi) = (1e-12, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cell_shannon(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let init = OccupancyGrid::filled(6, 6, 1.0, 0.5).unwrap();
        let now = OccupancyGrid::filled(6, 6, 1.0, lo).unwrap();
        let truth = OccupancyGrid::filled(6, 6, 1.0, 0.0).unwrap();
        let c = completion_metrics(&now, map_shannon_entropy(&init), &truth).unwrap();
        assert!((c.pct_entropy_complete - 0.5).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch() {
        let a = OccupancyGrid::filled(2, 2, 1.0, 0.0).unwrap();
        let b = OccupancyGrid::filled(2, 3, 1.0, 0.0).unwrap();
        assert!(completion_metrics(&a, 1.0, &b).is_err());
    }
}
