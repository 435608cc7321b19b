//! Frontier extraction and clustering.
//!
//! Frontier cells are free cells with a non-zero map gradient that are not
//! next to obstacles. They are binned into `tau_cl x tau_cl` square tiles and
//! one member of each tile, picked by a seeded RNG, represents it.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{
    check_thresholds, convolve_binary, gradient_nonzero, partition, CellMask, Kernel, OccupancyGrid,
};

#[derive(Debug, Clone, PartialEq)]
pub enum FrontierRule {
    /// `(free ∩ gradient) - obstacle_neighbours`.
    Standard,
    /// Cells below `free_below` with a non-zero gradient. No obstacle-neighbour
    /// subtraction: obstacles already fail the value test.
    Poc { free_below: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierConfig {
    pub tau_fs: f64,
    pub tau_ob: f64,
    /// Side of the clustering tile in cells; 1 disables clustering.
    pub tau_cl: usize,
    pub kernel: Kernel,
    pub rng_seed: u64,
    pub eps_known: f64,
    pub rule: FrontierRule,
}

impl Default for FrontierConfig {
    fn default() -> Self {
        Self {
            tau_fs: 0.2,
            tau_ob: 0.65,
            tau_cl: 1,
            kernel: Kernel::default(),
            rng_seed: 0,
            eps_known: 0.02,
            rule: FrontierRule::Standard,
        }
    }
}

impl FrontierConfig {
    /// The proof-of-concept rule: occupancy below 0.02 and non-zero gradient, no clustering.
    pub fn poc(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            rule: FrontierRule::Poc { free_below: 0.02 },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_thresholds(self.tau_fs, self.tau_ob)?;
        if self.tau_cl == 0 {
            return Err(Error::param("tau_cl must be at least 1"));
        }
        if let FrontierRule::Poc { free_below } = self.rule {
            if !(free_below > 0.0 && free_below < 1.0) {
                return Err(Error::param(format!("free_below must be in (0, 1), got {free_below}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrontierList {
    /// One cell per cluster, in cluster order.
    pub representatives: Vec<usize>,
    /// Cells of each cluster in increasing index order.
    pub clusters: Vec<Vec<usize>>,
    /// All frontier cells in increasing index order.
    pub raw: Vec<usize>,
}

impl FrontierList {
    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    /// `cluster_id,rep_row,rep_col,cluster_size` rows with a header.
    pub fn write_csv<W: Write>(&self, grid: &OccupancyGrid, mut out: W) -> std::io::Result<()> {
        writeln!(out, "cluster_id,rep_row,rep_col,cluster_size")?;
        for (id, (rep, cluster)) in self.representatives.iter().zip(&self.clusters).enumerate() {
            let (r, c) = grid.row_col(*rep);
            writeln!(out, "{id},{r},{c},{}", cluster.len())?;
        }
        Ok(())
    }
}

/// Raw frontier cells before clustering.
pub fn frontier_cells(grid: &OccupancyGrid, cfg: &FrontierConfig) -> Result<CellMask> {
    cfg.validate()?;
    let gradient = gradient_nonzero(grid);
    Ok(match cfg.rule {
        FrontierRule::Standard => {
            let parts = partition(grid, cfg.tau_fs, cfg.tau_ob, cfg.eps_known)?;
            let near_obstacles = convolve_binary(&parts.occupied, &cfg.kernel);
            parts.free.intersection(&gradient).difference(&near_obstacles)
        }
        FrontierRule::Poc { free_below } => {
            CellMask::from_fn(grid, |v| v < free_below).intersection(&gradient)
        }
    })
}

pub fn extract_frontiers(grid: &OccupancyGrid, cfg: &FrontierConfig) -> Result<FrontierList> {
    let raw = frontier_cells(grid, cfg)?.to_vec();
    Ok(cluster(grid, raw, cfg.tau_cl, cfg.rng_seed))
}

fn cluster(grid: &OccupancyGrid, raw: Vec<usize>, tau_cl: usize, seed: u64) -> FrontierList {
    if tau_cl == 1 {
        return FrontierList {
            representatives: raw.clone(),
            clusters: raw.iter().map(|&i| vec![i]).collect(),
            raw,
        };
    }
    let mut tiles: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &i in &raw {
        let (r, c) = grid.row_col(i);
        tiles.entry((r / tau_cl, c / tau_cl)).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clusters: Vec<Vec<usize>> = tiles.into_values().collect();
    let representatives = clusters
        .iter()
        .map(|members| members[rng.random_range(0..members.len())])
        .collect();
    FrontierList {
        representatives,
        clusters,
        raw,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_unknown() -> OccupancyGrid {
        let cells = (0..100).map(|i| if i % 10 < 5 { 0.0 } else { 0.5 }).collect();
        OccupancyGrid::new(10, 10, 0.1, (0.0, 0.0), cells).unwrap()
    }

    #[test]
    fn known_free_map_has_no_frontiers() {
        let g = OccupancyGrid::filled(8, 8, 0.1, 0.0).unwrap();
        assert!(extract_frontiers(&g, &FrontierConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn boundary_column_is_the_frontier() {
        let g = half_unknown();
        let f = extract_frontiers(&g, &FrontierConfig::default()).unwrap();
        let expect: Vec<usize> = (0..10).map(|r| r * 10 + 4).collect();
        assert_eq!(f.raw, expect);
        assert_eq!(f.representatives, expect);
    }

    #[test]
    fn tiles_of_five() {
        let g = half_unknown();
        let cfg = FrontierConfig {
            tau_cl: 5,
            rng_seed: 42,
            ..FrontierConfig::default()
        };
        let f = extract_frontiers(&g, &cfg).unwrap();
        assert_eq!(f.clusters.len(), 2);
        assert_eq!(f.representatives.len(), 2);
        for (rep, members) in f.representatives.iter().zip(&f.clusters) {
            assert!(members.contains(rep));
            let tile = rep / 10 / 5;
            assert!(members.iter().all(|m| m / 10 / 5 == tile));
        }
        assert_eq!(extract_frontiers(&g, &cfg).unwrap(), f);
    }

    #[test]
    fn obstacle_neighbours_removed() {
        let mut cells: Vec<f64> = (0..100).map(|i| if i % 10 < 5 { 0.0 } else { 0.5 }).collect();
        cells[3 * 10 + 5] = 1.0;
        let g = OccupancyGrid::new(10, 10, 0.1, (0.0, 0.0), cells).unwrap();
        let f = extract_frontiers(&g, &FrontierConfig::default()).unwrap();
        for r in 2..=4 {
            assert!(!f.raw.contains(&(r * 10 + 4)), "row {r}");
        }
        assert!(f.raw.contains(&(10 + 4)));
    }

    #[test]
    fn csv_export() {
        let g = half_unknown();
        let f = extract_frontiers(&g, &FrontierConfig::default()).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("cluster_id,rep_row,rep_col,cluster_size\n0,0,4,1\n"));
        assert_eq!(text.lines().count(), 11);
    }
}
