#![allow(dead_code)]

use bex_core::frontier::FrontierConfig;
use bex_core::OccupancyGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random grid built from rectangles of free, unknown, occupied and noisy values.
pub fn blocky_grid(w: usize, h: usize, seed: u64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = vec![0.5; w * h];
    for _ in 0..rng.random_range(3..12) {
        let (r0, c0) = (rng.random_range(0..h), rng.random_range(0..w));
        let (rh, cw) = (rng.random_range(1..=h / 2), rng.random_range(1..=w / 2));
        let kind = rng.random_range(0..5);
        for r in r0..(r0 + rh).min(h) {
            for c in c0..(c0 + cw).min(w) {
                cells[r * w + c] = match kind {
                    0 | 1 => 0.0,
                    2 => 1.0,
                    3 => rng.random::<f64>() * 0.3,
                    _ => 0.5,
                };
            }
        }
    }
    OccupancyGrid::new(w, h, 0.1, (0.0, 0.0), cells).unwrap()
}

/// Frontier cells straight from their definition, one cell at a time.
pub fn brute_force_frontiers(grid: &OccupancyGrid, cfg: &FrontierConfig) -> Vec<usize> {
    let (w, h) = (grid.width() as isize, grid.height() as isize);
    let val = |r: isize, c: isize| grid.at(r as usize, c as usize);
    let unknown = |v: f64| (v - 0.5).abs() <= 1e-12;
    let free = |v: f64| !unknown(v) && v < cfg.tau_fs;
    let occupied = |v: f64| !unknown(v) && v > cfg.tau_ob;
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let v = val(r, c);
            if !free(v) {
                continue;
            }
            let mut grad = false;
            for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let (rr, cc) = (r + dr, c + dc);
                if rr >= 0 && rr < h && cc >= 0 && cc < w && (val(rr, cc) - v).abs() > 1e-12 {
                    grad = true;
                }
            }
            let mut near_obstacle = false;
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (rr, cc) = (r + dr, c + dc);
                    if rr >= 0 && rr < h && cc >= 0 && cc < w && occupied(val(rr, cc)) {
                        near_obstacle = true;
                    }
                }
            }
            if grad && !near_obstacle {
                out.push((r * w + c) as usize);
            }
        }
    }
    out
}

/// Behavioral entropy of `(p, 1 - p)` from the closed form, conditioned for two outcomes.
pub fn behavioral_bernoulli(p: f64, alpha: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let beta = ln2.powf(1.0 - alpha);
    let w = |q: f64| if q <= 0.0 { 0.0 } else { (-beta * (-q.ln()).powf(alpha)).exp() };
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    h(w(p)) + h(w(1.0 - p))
}

pub fn shannon_bernoulli(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    h(p) + h(1.0 - p)
}
