use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explore::Pose;
use crate::grid::OccupancyGrid;

const OBSTACLE_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;
const PLACEMENT_ATTEMPTS: usize = 1000;

/// Initial-map noise per quadrant, as percent intervals `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadrantNoise {
    pub top_left: (f64, f64),
    pub top_right: (f64, f64),
    pub bottom_right: (f64, f64),
    pub bottom_left: (f64, f64),
}

impl Default for QuadrantNoise {
    fn default() -> Self {
        Self {
            top_left: (0.0, 5.0),
            top_right: (0.0, 50.0),
            bottom_right: (0.0, 15.0),
            bottom_left: (0.0, 25.0),
        }
    }
}

impl QuadrantNoise {
    pub fn uniform(interval: (f64, f64)) -> Self {
        Self {
            top_left: interval,
            top_right: interval,
            bottom_right: interval,
            bottom_left: interval,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("top_left", self.top_left),
            ("top_right", self.top_right),
            ("bottom_right", self.bottom_right),
            ("bottom_left", self.bottom_left),
        ] {
            if !(0.0 <= lo && lo <= hi && hi <= 100.0) {
                return Err(Error::param(format!("{name} interval [{lo}, {hi}] is not within [0, 100]")));
            }
        }
        Ok(())
    }

    /// Interval for a cell. Rows count down from the top; the left half is `col < width / 2`.
    pub fn for_cell(&self, grid: &OccupancyGrid, idx: usize) -> (f64, f64) {
        let (r, c) = grid.row_col(idx);
        let top = 2 * r < grid.height();
        let left = 2 * c < grid.width();
        match (top, left) {
            (true, true) => self.top_left,
            (true, false) => self.top_right,
            (false, false) => self.bottom_right,
            (false, true) => self.bottom_left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Cells along x.
    pub width: usize,
    /// Cells along y.
    pub height: usize,
    pub resolution: f64,
    pub quadrants: QuadrantNoise,
    /// Inclusive range of obstacle counts.
    pub obstacle_count: (usize, usize),
    /// Range of each obstacle's area as a fraction of the map area.
    pub obstacle_area: (f64, f64),
    /// Minimum free distance between an obstacle and any start pose.
    pub start_clearance: f64,
    /// Start poses in world units; defaults to the centre then the quadrant centres TL, TR, BR, BL.
    pub starts: Option<Vec<(f64, f64)>>,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            width: 300,
            height: 500,
            resolution: 0.1,
            quadrants: QuadrantNoise::default(),
            obstacle_count: (8, 15),
            obstacle_area: (0.01, 0.04),
            start_clearance: 1.0,
            starts: None,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        self.quadrants.validate()?;
        if self.width < 2 || self.height < 2 {
            return Err(Error::param("environment must be at least 2x2 cells"));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(Error::param(format!("resolution must be > 0, got {}", self.resolution)));
        }
        let (lo, hi) = self.obstacle_count;
        if lo > hi {
            return Err(Error::param(format!("obstacle_count range [{lo}, {hi}] is inverted")));
        }
        let (lo, hi) = self.obstacle_area;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(Error::param(format!("obstacle_area range [{lo}, {hi}] must lie in (0, 1)")));
        }
        if !(self.start_clearance >= 0.0) {
            return Err(Error::param("start_clearance must be >= 0"));
        }
        Ok(())
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.width as f64 * self.resolution, self.height as f64 * self.resolution)
    }

    pub fn start_poses(&self) -> Vec<Pose> {
        if let Some(s) = &self.starts {
            return s.iter().map(|&(x, y)| Pose::new(x, y)).collect();
        }
        let (w, h) = self.extent();
        vec![
            Pose::new(w / 2.0, h / 2.0),
            Pose::new(w / 4.0, h / 4.0),
            Pose::new(3.0 * w / 4.0, h / 4.0),
            Pose::new(3.0 * w / 4.0, 3.0 * h / 4.0),
            Pose::new(w / 4.0, 3.0 * h / 4.0),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PocEnvironment {
    /// Cells are exactly 0 (free) or 1 (occupied).
    pub ground_truth: OccupancyGrid,
    pub initial: OccupancyGrid,
    pub quadrant_noise: QuadrantNoise,
    pub starts: Vec<Pose>,
    pub obstacle_seed: u64,
    /// Counter-clockwise vertices of each obstacle, in world units.
    pub obstacles: Vec<Vec<(f64, f64)>>,
    pub config: EnvConfig,
}

impl PocEnvironment {
    /// 1-based start index, as used in trial configs.
    pub fn start(&self, index: usize) -> Result<Pose> {
        index
            .checked_sub(1)
            .and_then(|i| self.starts.get(i))
            .copied()
            .ok_or_else(|| Error::param(format!("start index {index} outside 1..={}", self.starts.len())))
    }
}

pub fn generate_environment(seed: u64, cfg: &EnvConfig) -> Result<PocEnvironment> {
    cfg.validate()?;
    let starts = cfg.start_poses();
    let (ext_x, ext_y) = cfg.extent();
    for s in &starts {
        if !(s.is_finite() && s.x >= 0.0 && s.y >= 0.0 && s.x < ext_x && s.y < ext_y) {
            return Err(Error::param(format!("start ({}, {}) lies outside the map", s.x, s.y)));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(OBSTACLE_STREAM);
    let count = rng.random_range(cfg.obstacle_count.0..=cfg.obstacle_count.1);
    let mut obstacles = Vec::with_capacity(count);
    for k in 0..count {
        let poly = (0..PLACEMENT_ATTEMPTS)
            .map(|_| random_polygon(&mut rng, cfg))
            .find(|poly| starts.iter().all(|s| clear_of(poly, s, cfg.start_clearance)))
            .ok_or_else(|| Error::param(format!("could not place obstacle {k} clear of the start poses")))?;
        obstacles.push(poly);
    }

    let mut truth = OccupancyGrid::filled(cfg.width, cfg.height, cfg.resolution, 0.0)?;
    for poly in &obstacles {
        rasterize(&mut truth, poly);
    }

    let mut noise = ChaCha8Rng::seed_from_u64(seed);
    noise.set_stream(NOISE_STREAM);
    let mut initial = truth.clone();
    for i in 0..initial.len() {
        let (lo, hi) = cfg.quadrants.for_cell(&truth, i);
        let u = (lo + (hi - lo) * noise.random::<f64>()) / 100.0;
        let v = if truth.get(i) > 0.5 { 1.0 - u } else { u };
        initial.set(i, v);
    }

    Ok(PocEnvironment {
        ground_truth: truth,
        initial,
        quadrant_noise: cfg.quadrants,
        starts,
        obstacle_seed: seed,
        obstacles,
        config: cfg.clone(),
    })
}

fn random_polygon(rng: &mut ChaCha8Rng, cfg: &EnvConfig) -> Vec<(f64, f64)> {
    let (ext_x, ext_y) = cfg.extent();
    let n = rng.random_range(5..=9);
    let stretch = (rng.random_range(-1.0..1.0) * std::f64::consts::LN_2).exp().sqrt();
    let mut pts: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let a = rng.random_range(0.0..TAU);
            let r = rng.random_range(0.6..1.0);
            (r * a.cos() * stretch, r * a.sin() / stretch)
        })
        .collect();
    pts = convex_hull(pts);
    let target = rng.random_range(cfg.obstacle_area.0..=cfg.obstacle_area.1) * ext_x * ext_y;
    let scale = (target / polygon_area(&pts)).sqrt();
    let rot = rng.random_range(0.0..TAU);
    let (s, c) = rot.sin_cos();
    let cx = rng.random_range(0.0..ext_x);
    let cy = rng.random_range(0.0..ext_y);
    pts.iter()
        .map(|&(x, y)| (cx + scale * (c * x - s * y), cy + scale * (s * x + c * y)))
        .collect()
}

/// Andrew's monotone chain; counter-clockwise, no repeated end point.
pub(crate) fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

pub(crate) fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

pub(crate) fn inside_convex(poly: &[(f64, f64)], p: (f64, f64)) -> bool {
    let n = poly.len();
    n >= 3 && (0..n).all(|i| cross(poly[i], poly[(i + 1) % n], p) >= 0.0)
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

fn clear_of(poly: &[(f64, f64)], s: &Pose, clearance: f64) -> bool {
    let p = (s.x, s.y);
    if inside_convex(poly, p) {
        return false;
    }
    let n = poly.len();
    (0..n).all(|i| segment_distance(poly[i], poly[(i + 1) % n], p) > clearance)
}

fn rasterize(grid: &mut OccupancyGrid, poly: &[(f64, f64)]) {
    let res = grid.resolution();
    let (ox, oy) = grid.origin();
    let xs = poly.iter().map(|p| p.0);
    let ys = poly.iter().map(|p| p.1);
    let (x0, x1) = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ys.clone().fold(f64::INFINITY, f64::min), ys.fold(f64::NEG_INFINITY, f64::max));
    let (w, h) = (grid.width(), grid.height());
    let col = |x: f64| (((x - ox) / res).floor().max(0.0) as usize).min(w - 1);
    let row = |y: f64| (((y - oy) / res).floor().max(0.0) as usize).min(h - 1);
    for r in row(y0)..=row(y1) {
        for c in col(x0)..=col(x1) {
            let idx = grid.index(r, c);
            if inside_convex(poly, grid.cell_center(idx)) {
                grid.set(idx, 1.0);
            }
        }
    }
}
