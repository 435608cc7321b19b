use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::grid::OccupancyGrid;

use super::sensor::Pose;

/// Source of travel distances from the robot to candidate cells.
pub trait PathLength: Sync {
    /// Prepare for queries from `from` on the current map.
    fn prepare(&mut self, _grid: &OccupancyGrid, _from: Pose) {}

    /// Distance to the centre of `target`, or `None` when unreachable.
    fn length(&self, grid: &OccupancyGrid, from: Pose, target: usize) -> Option<f64>;
}

/// Straight-line distance, ignoring obstacles.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl PathLength for Euclidean {
    fn length(&self, grid: &OccupancyGrid, from: Pose, target: usize) -> Option<f64> {
        Some(from.distance(&Pose::of_cell(grid, target)))
    }
}

/// 8-connected shortest path through cells at or below `tau_ob`.
#[derive(Debug, Clone)]
pub struct GridShortestPath {
    pub tau_ob: f64,
    dist: Vec<f64>,
    offset: f64,
}

impl GridShortestPath {
    pub fn new(tau_ob: f64) -> Self {
        Self {
            tau_ob,
            dist: Vec::new(),
            offset: 0.0,
        }
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PathLength for GridShortestPath {
    fn prepare(&mut self, grid: &OccupancyGrid, from: Pose) {
        self.dist = vec![f64::INFINITY; grid.len()];
        let Some(start) = grid.cell_at(from.x, from.y) else {
            return;
        };
        self.offset = from.distance(&Pose::of_cell(grid, start));
        let (w, h) = (grid.width() as isize, grid.height() as isize);
        let res = grid.resolution();
        let diag = res * std::f64::consts::SQRT_2;
        let mut heap = BinaryHeap::new();
        self.dist[start] = 0.0;
        heap.push(Entry(0.0, start));
        while let Some(Entry(d, i)) = heap.pop() {
            if d > self.dist[i] {
                continue;
            }
            let (r, c) = (i as isize / w, i as isize % w);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (r + dr, c + dc);
                    if nr < 0 || nc < 0 || nr >= h || nc >= w {
                        continue;
                    }
                    let j = (nr * w + nc) as usize;
                    if grid.get(j) > self.tau_ob {
                        continue;
                    }
                    let nd = d + if dr != 0 && dc != 0 { diag } else { res };
                    if nd < self.dist[j] {
                        self.dist[j] = nd;
                        heap.push(Entry(nd, j));
                    }
                }
            }
        }
    }

    fn length(&self, _grid: &OccupancyGrid, _from: Pose, target: usize) -> Option<f64> {
        let d = *self.dist.get(target)?;
        d.is_finite().then_some(d + self.offset)
    }
}
