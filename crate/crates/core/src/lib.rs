//! Behavioral entropy measures, simplex-based sensitivity metrics, occupancy
//! grids, frontier extraction and an entropy-driven exploration loop.

pub mod entropy;
pub mod error;
pub mod explore;
pub mod frontier;
pub mod grid;
pub mod metrics;
pub mod poc;
pub mod simplex;

pub use entropy::{
    behavioral_entropy, min_entropy, renyi_entropy, shannon_entropy, Distribution, EntropySpec, Family,
    PrelecParams,
};
pub use error::{Error, Result};
pub use grid::OccupancyGrid;
