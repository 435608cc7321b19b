use crate::entropy::{EntropySpec, Evaluator};
use crate::error::{Error, Result};
use crate::grid::OccupancyGrid;

use super::sensor::DiskStencil;

pub(crate) fn cell_evaluator(spec: &EntropySpec) -> Result<Evaluator> {
    if let EntropySpec::BehavioralConditioned { outcomes, .. } = spec {
        if *outcomes != 2 {
            return Err(Error::param(format!(
                "per-cell gain needs Behavioral conditioned for 2 outcomes, got {outcomes}"
            )));
        }
    }
    spec.evaluator()
}

/// Sum of per-cell Bernoulli entropy over `footprint`.
pub fn info_gain(grid: &OccupancyGrid, footprint: &[usize], spec: &EntropySpec) -> Result<f64> {
    let eval = cell_evaluator(spec)?;
    Ok(footprint.iter().map(|&i| eval.bernoulli(grid.get(i))).sum())
}

/// Per-cell entropy with row prefix sums, for fast disk totals.
#[derive(Debug, Clone)]
pub(crate) struct GainField {
    eval: Evaluator,
    width: usize,
    height: usize,
    values: Vec<f64>,
    // width + 1 entries per row
    prefix: Vec<f64>,
    dirty: Vec<bool>,
}

impl GainField {
    pub(crate) fn new(grid: &OccupancyGrid, spec: &EntropySpec) -> Result<Self> {
        let eval = cell_evaluator(spec)?;
        let (width, height) = (grid.width(), grid.height());
        let values = grid.cells().iter().map(|&p| eval.bernoulli(p)).collect();
        let mut field = Self {
            eval,
            width,
            height,
            values,
            prefix: vec![0.0; (width + 1) * height],
            dirty: vec![true; height],
        };
        field.refresh();
        Ok(field)
    }

    pub(crate) fn update(&mut self, grid: &OccupancyGrid, changed: &[usize]) {
        for &i in changed {
            self.values[i] = self.eval.bernoulli(grid.get(i));
            self.dirty[i / self.width] = true;
        }
        self.refresh();
    }

    fn refresh(&mut self) {
        let w = self.width;
        for row in 0..self.height {
            if !self.dirty[row] {
                continue;
            }
            self.dirty[row] = false;
            let vals = &self.values[row * w..(row + 1) * w];
            let pre = &mut self.prefix[row * (w + 1)..(row + 1) * (w + 1)];
            pre[0] = 0.0;
            for (c, v) in vals.iter().enumerate() {
                pre[c + 1] = pre[c] + v;
            }
        }
    }

    pub(crate) fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Entropy summed over the disk stencil centred on cell `center`, clipped to the grid.
    pub(crate) fn disk_sum(&self, center: usize, stencil: &DiskStencil) -> f64 {
        let (w, h) = (self.width as isize, self.height as isize);
        let r0 = (center / self.width) as isize;
        let c0 = (center % self.width) as isize;
        let mut total = 0.0;
        for &(dr, half) in stencil.spans() {
            let r = r0 + dr;
            if r < 0 || r >= h {
                continue;
            }
            let lo = (c0 - half).max(0);
            let hi = (c0 + half).min(w - 1);
            if hi < lo {
                continue;
            }
            let base = r as usize * (self.width + 1);
            total += self.prefix[base + hi as usize + 1] - self.prefix[base + lo as usize];
        }
        total.max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::sensor::{sensor_footprint, Pose, SensorModel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_cells_carry_no_gain() {
        let g = OccupancyGrid::new(2, 2, 1.0, (0.0, 0.0), vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let spec = EntropySpec::behavioral(0.4, 2).unwrap();
        assert_eq!(info_gain(&g, &[0, 1, 2, 3], &spec).unwrap(), 0.0);
    }

    #[test]
    fn half_cells_give_ln2_each() {
        let g = OccupancyGrid::filled(4, 4, 1.0, 0.5).unwrap();
        for alpha in [0.1, 0.7, 3.0] {
            let spec = EntropySpec::behavioral(alpha, 2).unwrap();
            let got = info_gain(&g, &(0..16).collect::<Vec<_>>(), &spec).unwrap();
            assert!((got - 16.0 * std::f64::consts::LN_2).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_wrong_conditioning() {
        let g = OccupancyGrid::filled(2, 2, 1.0, 0.5).unwrap();
        let spec = EntropySpec::behavioral(0.4, 3).unwrap();
        assert!(info_gain(&g, &[0], &spec).is_err());
    }

    #[test]
    fn disk_sums_match_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cells: Vec<f64> = (0..40 * 30).map(|_| rng.random::<f64>()).collect();
        let mut g = OccupancyGrid::new(40, 30, 0.1, (0.0, 0.0), cells).unwrap();
        let spec = EntropySpec::renyi(0.5).unwrap();
        let mut field = GainField::new(&g, &spec).unwrap();
        let stencil = DiskStencil::new(0.5, 0.1);
        let changed = [5, 6, 7, 400, 1199];
        for &i in &changed {
            g.set(i, 0.0);
        }
        field.update(&g, &changed);
        for center in [0, 17, 39, 410, 1199, 620] {
            let fp = sensor_footprint(&g, Pose::of_cell(&g, center), &SensorModel::Disk { radius: 0.5 }, 0.65);
            let direct = info_gain(&g, &fp, &spec).unwrap();
            assert!((field.disk_sum(center, &stencil) - direct).abs() < 1e-10);
        }
    }
}
