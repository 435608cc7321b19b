//! Frontier utilities and the exploration loop.

mod gain;
mod path;
mod sensor;

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

pub use gain::info_gain;
pub use path::{Euclidean, GridShortestPath, PathLength};
pub use sensor::{disk_cells, sensor_footprint, GoalRegion, Pose, SensorModel};

use crate::entropy::{EntropySpec, Evaluator};
use crate::error::{Error, Result};
use crate::frontier::{extract_frontiers, FrontierConfig, FrontierList};
use crate::grid::OccupancyGrid;
use crate::metrics::{area_fraction, entropy_fraction};
use gain::{cell_evaluator, GainField};
use sensor::DiskStencil;

pub const DEFAULT_EPS_INFO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityRow {
    pub frontier: usize,
    pub info_gain: f64,
    pub path_length: f64,
    pub utility: f64,
    /// The raw path length was below one cell and was raised to it.
    pub floored: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UtilityTable {
    pub rows: Vec<UtilityRow>,
    /// Representatives dropped because the path provider found no route.
    pub unreachable: usize,
}

impl UtilityTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn max_gain(&self) -> f64 {
        self.rows.iter().map(|r| r.info_gain).fold(0.0, f64::max)
    }

    pub fn floored(&self) -> usize {
        self.rows.iter().filter(|r| r.floored).count()
    }
}

pub fn utility_row(frontier: usize, info_gain: f64, raw_length: f64, min_length: f64) -> UtilityRow {
    let floored = !(raw_length >= min_length);
    let path_length = if floored { min_length } else { raw_length };
    UtilityRow {
        frontier,
        info_gain,
        path_length,
        utility: info_gain / path_length,
        floored,
    }
}

// Gain source that is reused across iterations of one exploration run.
struct GainSource {
    sensor: SensorModel,
    eval: Evaluator,
    tau_ob: f64,
    disk: Option<(GainField, DiskStencil)>,
}

impl GainSource {
    fn new(grid: &OccupancyGrid, spec: &EntropySpec, sensor: SensorModel, tau_ob: f64) -> Result<Self> {
        sensor.validate()?;
        let eval = cell_evaluator(spec)?;
        let disk = match sensor {
            SensorModel::Disk { radius } => Some((
                GainField::new(grid, spec)?,
                DiskStencil::new(radius, grid.resolution()),
            )),
            SensorModel::Beams { .. } => None,
        };
        Ok(Self {
            sensor,
            eval,
            tau_ob,
            disk,
        })
    }

    fn update(&mut self, grid: &OccupancyGrid, changed: &[usize]) {
        if let Some((field, _)) = &mut self.disk {
            field.update(grid, changed);
        }
    }

    fn gain_at(&self, grid: &OccupancyGrid, cell: usize) -> f64 {
        match &self.disk {
            Some((field, stencil)) => field.disk_sum(cell, stencil),
            None => sensor_footprint(grid, Pose::of_cell(grid, cell), &self.sensor, self.tau_ob)
                .iter()
                .map(|&i| self.eval.bernoulli(grid.get(i)))
                .sum(),
        }
    }

    fn table(&self, grid: &OccupancyGrid, frontiers: &FrontierList, robot: Pose, path: &dyn PathLength) -> UtilityTable {
        let res = grid.resolution();
        let rows: Vec<Option<UtilityRow>> = frontiers
            .representatives
            .par_iter()
            .map(|&f| {
                let len = path.length(grid, robot, f)?;
                Some(utility_row(f, self.gain_at(grid, f), len, res))
            })
            .collect();
        let total = rows.len();
        let rows: Vec<UtilityRow> = rows.into_iter().flatten().collect();
        UtilityTable {
            unreachable: total - rows.len(),
            rows,
        }
    }
}

/// One row per representative: predicted gain at the frontier cell centre over path length.
pub fn evaluate_frontiers(
    grid: &OccupancyGrid,
    frontiers: &FrontierList,
    robot: Pose,
    spec: &EntropySpec,
    sensor: &SensorModel,
    tau_ob: f64,
    path: &mut dyn PathLength,
) -> Result<UtilityTable> {
    if frontiers.is_empty() {
        return Err(Error::param("no frontiers to evaluate"));
    }
    let source = GainSource::new(grid, spec, *sensor, tau_ob)?;
    path.prepare(grid, robot);
    Ok(source.table(grid, frontiers, robot, path))
}

/// Highest utility; ties go to the shorter path, then the lower cell index.
pub fn select_frontier(table: &UtilityTable) -> Result<UtilityRow> {
    table
        .rows
        .iter()
        .copied()
        .reduce(|best, row| {
            let better = row
                .utility
                .total_cmp(&best.utility)
                .then_with(|| best.path_length.total_cmp(&row.path_length))
                .then_with(|| best.frontier.cmp(&row.frontier))
                .is_gt();
            if better {
                row
            } else {
                best
            }
        })
        .ok_or(Error::EmptyTable)
}

/// Updates the map from observations made at a pose.
pub trait Mapper {
    /// Observe from `at`, pushing the index of every cell it changes onto `changed`.
    fn observe(&mut self, grid: &mut OccupancyGrid, at: Pose, changed: &mut Vec<usize>);
}

/// Copies ground truth into every cell within `radius`.
#[derive(Debug, Clone)]
pub struct PerfectDiskMapper<'a> {
    pub truth: &'a OccupancyGrid,
    pub radius: f64,
    scratch: Vec<usize>,
}

impl<'a> PerfectDiskMapper<'a> {
    pub fn new(truth: &'a OccupancyGrid, radius: f64) -> Self {
        Self {
            truth,
            radius,
            scratch: Vec::new(),
        }
    }
}

impl Mapper for PerfectDiskMapper<'_> {
    fn observe(&mut self, grid: &mut OccupancyGrid, at: Pose, changed: &mut Vec<usize>) {
        self.scratch.clear();
        disk_cells(grid, at, self.radius, &mut self.scratch);
        for &i in &self.scratch {
            let t = self.truth.get(i);
            if grid.get(i) != t {
                grid.set(i, t);
                changed.push(i);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Motion {
    /// Sample the segment to the frontier every cell resolution, mapping at each sample.
    StraightLine,
    /// Jump to the frontier and map once.
    Teleport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathModel {
    Euclidean,
    Grid,
}

#[derive(Debug, Clone)]
pub struct ExploreConfig {
    pub frontier: FrontierConfig,
    pub sensor: SensorModel,
    pub spec: EntropySpec,
    pub motion: Motion,
    pub path: PathModel,
    pub eps_info: f64,
    /// Defaults to 10 x cells / footprint cells.
    pub max_iterations: Option<usize>,
    /// Stop moving once within this distance of the chosen frontier.
    pub goal_radius: Option<f64>,
    pub record_timing: bool,
}

impl ExploreConfig {
    pub fn new(spec: EntropySpec, sensor: SensorModel) -> Self {
        Self {
            frontier: FrontierConfig::default(),
            sensor,
            spec,
            motion: Motion::StraightLine,
            path: PathModel::Euclidean,
            eps_info: DEFAULT_EPS_INFO,
            max_iterations: None,
            goal_radius: None,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.frontier.validate()?;
        self.sensor.validate()?;
        cell_evaluator(&self.spec)?;
        if !(self.eps_info >= 0.0) {
            return Err(Error::param(format!("eps_info must be >= 0, got {}", self.eps_info)));
        }
        if let Some(g) = self.goal_radius {
            if !(g > 0.0) {
                return Err(Error::param(format!("goal radius must be > 0, got {g}")));
            }
        }
        Ok(())
    }

    pub fn iteration_limit(&self, grid: &OccupancyGrid) -> usize {
        self.max_iterations.unwrap_or_else(|| {
            let fp = DiskStencil::new(self.sensor.reach(), grid.resolution()).cells().max(1);
            (10 * grid.len()).div_ceil(fp).max(1)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    NoFrontiers,
    NegligibleGain,
    /// The loop hit its iteration limit; the run is incomplete.
    MaxIterations,
}

impl Termination {
    pub fn is_complete(self) -> bool {
        self != Termination::MaxIterations
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::NoFrontiers => "no-frontiers",
            Termination::NegligibleGain => "negligible-gain",
            Termination::MaxIterations => "max-iterations",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub robot: Pose,
    pub chosen_frontier: Option<usize>,
    pub info_gain: Option<f64>,
    pub path_length: Option<f64>,
    pub shannon_remaining: f64,
    pub pct_entropy_complete: f64,
    pub pct_area_correct: f64,
    pub wall_ms: Option<f64>,
}

pub const LOG_HEADER: &str = "iteration,robot_x,robot_y,chosen_frontier,info_gain,path_length,gt_shannon_remaining,pct_entropy_complete,pct_area_correct,wall_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationLog {
    /// Row 0 is the state after mapping at the start pose.
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub initial_entropy: f64,
    pub floored_paths: usize,
}

impl ExplorationLog {
    /// Frontier visits performed.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("log always holds the initial record")
    }

    /// First iteration whose entropy completion reaches `fraction`.
    pub fn iterations_to(&self, fraction: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.pct_entropy_complete >= fraction)
            .map(|r| r.iteration)
    }

    /// First iteration whose area completion reaches `fraction`.
    pub fn iterations_to_area(&self, fraction: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.pct_area_correct >= fraction)
            .map(|r| r.iteration)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{LOG_HEADER}")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.iteration,
                r.robot.x,
                r.robot.y,
                opt(r.chosen_frontier),
                opt(r.info_gain),
                opt(r.path_length),
                r.shannon_remaining,
                r.pct_entropy_complete,
                r.pct_area_correct,
                opt(r.wall_ms)
            )?;
        }
        Ok(())
    }
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Run the explorer from `start` until no worthwhile frontier remains.
///
/// `truth` is used only for the area metric; all map updates come from `mapper`.
pub fn explore(
    grid: &mut OccupancyGrid,
    truth: &OccupancyGrid,
    start: Pose,
    cfg: &ExploreConfig,
    mapper: &mut dyn Mapper,
) -> Result<ExplorationLog> {
    cfg.validate()?;
    if !grid.same_shape(truth) {
        return Err(Error::param("map and ground truth differ in shape"));
    }
    if !start.is_finite() || !grid.contains(start.x, start.y) {
        return Err(Error::param(format!("start pose ({}, {}) is outside the map", start.x, start.y)));
    }
    let clock = Instant::now();
    let limit = cfg.iteration_limit(grid);
    let res = grid.resolution();
    let mut shannon = GainField::new(grid, &EntropySpec::shannon())?;
    let initial_entropy = shannon.total();
    let mut source = GainSource::new(grid, &cfg.spec, cfg.sensor, cfg.frontier.tau_ob)?;
    let mut path: Box<dyn PathLength> = match cfg.path {
        PathModel::Euclidean => Box::new(Euclidean),
        PathModel::Grid => Box::new(GridShortestPath::new(cfg.frontier.tau_ob)),
    };

    let mut changed = Vec::new();
    let mut robot = start;
    mapper.observe(grid, robot, &mut changed);
    source.update(grid, &changed);
    shannon.update(grid, &changed);

    let record = |iteration, robot, choice: Option<UtilityRow>, grid: &OccupancyGrid, shannon: &GainField, started: Instant| {
        let remaining = shannon.total();
        IterationRecord {
            iteration,
            robot,
            chosen_frontier: choice.map(|c| c.frontier),
            info_gain: choice.map(|c| c.info_gain),
            path_length: choice.map(|c| c.path_length),
            shannon_remaining: remaining,
            pct_entropy_complete: entropy_fraction(remaining, initial_entropy),
            pct_area_correct: area_fraction(grid.cells(), truth.cells()),
            wall_ms: cfg.record_timing.then(|| started.elapsed().as_secs_f64() * 1e3),
        }
    };
    let mut records = vec![record(0, robot, None, grid, &shannon, clock)];
    let mut floored_paths = 0;

    let termination = loop {
        if records.len() > limit {
            break Termination::MaxIterations;
        }
        let started = Instant::now();
        let frontiers = extract_frontiers(grid, &cfg.frontier)?;
        if frontiers.is_empty() {
            break Termination::NoFrontiers;
        }
        path.prepare(grid, robot);
        let table = source.table(grid, &frontiers, robot, path.as_ref());
        if table.is_empty() {
            break Termination::NoFrontiers;
        }
        if table.max_gain() < cfg.eps_info {
            break Termination::NegligibleGain;
        }
        let choice = select_frontier(&table)?;
        floored_paths += usize::from(choice.floored);

        changed.clear();
        let target = Pose::of_cell(grid, choice.frontier);
        let goal = cfg.goal_radius.map(|radius| GoalRegion { center: target, radius });
        let steps = match cfg.motion {
            Motion::Teleport => 1,
            Motion::StraightLine => ((robot.distance(&target) / res).ceil() as usize).max(1),
        };
        let from = robot;
        for k in 1..=steps {
            let t = k as f64 / steps as f64;
            robot = if k == steps {
                target
            } else {
                Pose::new(from.x + (target.x - from.x) * t, from.y + (target.y - from.y) * t)
            };
            mapper.observe(grid, robot, &mut changed);
            if goal.is_some_and(|g| g.contains(&robot)) {
                break;
            }
        }
        source.update(grid, &changed);
        shannon.update(grid, &changed);
        records.push(record(records.len(), robot, Some(choice), grid, &shannon, started));
    };

    Ok(ExplorationLog {
        records,
        termination,
        initial_entropy,
        floored_paths,
    })
}
