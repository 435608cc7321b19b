//! Proof-of-concept benchmark: random polygon worlds with quadrant noise,
//! a noisy disk mapper, trial sweeps and completion statistics.

mod env;
mod sweep;

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use env::{generate_environment, EnvConfig, PocEnvironment, QuadrantNoise};
pub use sweep::{
    read_summary, spearman, summarize, write_summary, GroupStats, GROUP_STATS_HEADER, NoiseRanges, SeedSection, SummaryRow,
    SweepManifest, SweepSection, TrialOptionsSection, CONFIG_FORMAT, SUMMARY_FORMAT_VERSION,
};

pub use crate::metrics::{completion_metrics, Completion};

use crate::entropy::EntropySpec;
use crate::error::{Error, Result};
use crate::explore::{
    disk_cells, explore, ExplorationLog, ExploreConfig, Mapper, Motion, PathModel, Pose, SensorModel,
    DEFAULT_EPS_INFO,
};
use crate::frontier::FrontierConfig;
use crate::grid::OccupancyGrid;

/// Iteration cap for trials unless overridden.
pub const DEFAULT_TRIAL_ITERATIONS: usize = 10_000;

/// Entropy-completion thresholds reported per trial, in percent.
pub const THRESHOLDS: [u32; 5] = [50, 75, 90, 95, 99];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingNoise {
    pub level: u8,
    /// Upper end of the per-observation step, in probability units.
    pub range: f64,
}

impl MappingNoise {
    pub fn exact() -> Self {
        Self { level: 0, range: 0.0 }
    }

    pub fn level(level: u8, ranges: &NoiseRanges) -> Result<Self> {
        let range = match level {
            0 => 0.0,
            1 => ranges.level1,
            2 => ranges.level2,
            _ => return Err(Error::param(format!("mapping noise level must be 0, 1 or 2, got {level}"))),
        };
        if level > 0 && !(range > 0.0 && range <= 1.0) {
            return Err(Error::param(format!("noise range for level {level} must be in (0, 1], got {range}")));
        }
        Ok(Self { level, range })
    }
}

/// Observe `footprint`: exact truth at level 0, otherwise a random step of
/// `U[0, range]` toward the truth that never overshoots it. Cells already at
/// their true value draw nothing.
pub fn apply_mapping<R: Rng + ?Sized>(
    grid: &mut OccupancyGrid,
    footprint: &[usize],
    truth: &OccupancyGrid,
    noise: &MappingNoise,
    rng: &mut R,
    changed: &mut Vec<usize>,
) {
    for &i in footprint {
        let (v, t) = (grid.get(i), truth.get(i));
        if v == t {
            continue;
        }
        let next = if noise.level == 0 {
            t
        } else {
            let step = noise.range * rng.random::<f64>();
            if t < v {
                (v - step).max(t)
            } else {
                (v + step).min(t)
            }
        };
        if next != v {
            grid.set(i, next);
            changed.push(i);
        }
    }
}

/// Disk observations with [`apply_mapping`] updates.
pub struct PocMapper<'a> {
    truth: &'a OccupancyGrid,
    radius: f64,
    noise: MappingNoise,
    rng: ChaCha8Rng,
    scratch: Vec<usize>,
}

impl<'a> PocMapper<'a> {
    pub fn new(truth: &'a OccupancyGrid, radius: f64, noise: MappingNoise, rng: ChaCha8Rng) -> Self {
        Self {
            truth,
            radius,
            noise,
            rng,
            scratch: Vec::new(),
        }
    }

    pub fn into_rng(self) -> ChaCha8Rng {
        self.rng
    }
}

impl Mapper for PocMapper<'_> {
    fn observe(&mut self, grid: &mut OccupancyGrid, at: Pose, changed: &mut Vec<usize>) {
        self.scratch.clear();
        disk_cells(grid, at, self.radius, &mut self.scratch);
        apply_mapping(grid, &self.scratch, self.truth, &self.noise, &mut self.rng, changed);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub mapping: u64,
    pub frontier: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub radius: f64,
    pub noise: MappingNoise,
    /// 1-based index into the environment's start poses.
    pub start: usize,
    pub spec: EntropySpec,
    pub seeds: TrialSeeds,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl TrialConfig {
    /// Stream id of the mapping RNG. Depends on radius, noise level and start only,
    /// so every entropy spec sees the same noise stream.
    pub fn mapping_stream(&self) -> u64 {
        let mut h = splitmix(self.radius.to_bits());
        h = splitmix(h ^ u64::from(self.noise.level));
        splitmix(h ^ self.start as u64)
    }

    pub fn mapping_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seeds.mapping);
        rng.set_stream(self.mapping_stream());
        rng
    }

    pub fn group(&self) -> SpecGroup {
        SpecGroup::of(&self.spec)
    }

    /// File-name friendly label.
    pub fn slug(&self) -> String {
        let spec = self.spec.to_string().replace(':', "-");
        format!("{spec}_r{}_s{}_x{}", self.radius, self.noise.level, self.start)
    }
}

/// Reporting groups of entropy specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpecGroup {
    Shannon,
    RenyiBelowOne,
    /// Renyi with gamma = 2.
    Rqe,
    RenyiAboveOne,
    BehavioralBelowOne,
    BehavioralAboveOne,
}

impl SpecGroup {
    pub const ALL: [SpecGroup; 6] = [
        SpecGroup::Shannon,
        SpecGroup::RenyiBelowOne,
        SpecGroup::Rqe,
        SpecGroup::RenyiAboveOne,
        SpecGroup::BehavioralBelowOne,
        SpecGroup::BehavioralAboveOne,
    ];

    /// Behavioral with alpha = 1 is Shannon and is grouped with it.
    pub fn of(spec: &EntropySpec) -> Self {
        match *spec {
            EntropySpec::Shannon { .. } => SpecGroup::Shannon,
            EntropySpec::Renyi { gamma } if gamma == 2.0 => SpecGroup::Rqe,
            EntropySpec::Renyi { gamma } if gamma < 1.0 => SpecGroup::RenyiBelowOne,
            EntropySpec::Renyi { .. } => SpecGroup::RenyiAboveOne,
            _ => {
                let alpha = spec.theta();
                if alpha < 1.0 {
                    SpecGroup::BehavioralBelowOne
                } else if alpha > 1.0 {
                    SpecGroup::BehavioralAboveOne
                } else {
                    SpecGroup::Shannon
                }
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpecGroup::Shannon => "H_S",
            SpecGroup::RenyiBelowOne => "H_R_1-",
            SpecGroup::Rqe => "RQE",
            SpecGroup::RenyiAboveOne => "H_R_1+",
            SpecGroup::BehavioralBelowOne => "H_B_1-",
            SpecGroup::BehavioralAboveOne => "H_B_1+",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.label() == s)
    }
}

impl fmt::Display for SpecGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOptions {
    pub eps_info: f64,
    pub max_iterations: Option<usize>,
    pub motion: Motion,
    pub path: PathModel,
    pub record_timing: bool,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            eps_info: DEFAULT_EPS_INFO,
            max_iterations: Some(DEFAULT_TRIAL_ITERATIONS),
            motion: Motion::StraightLine,
            path: PathModel::Euclidean,
            record_timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialLog {
    pub config: TrialConfig,
    pub env_seed: u64,
    pub log: ExplorationLog,
    /// Per threshold in [`THRESHOLDS`]: first iteration reaching it, if any.
    pub iterations_to_completion: Vec<(u32, Option<usize>)>,
    /// Same for the area-correct metric.
    pub area_iterations_to_completion: Vec<(u32, Option<usize>)>,
}

impl TrialLog {
    pub fn iterations_to(&self, threshold: u32) -> Option<usize> {
        lookup(&self.iterations_to_completion, threshold)
    }

    pub fn area_iterations_to(&self, threshold: u32) -> Option<usize> {
        lookup(&self.area_iterations_to_completion, threshold)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        self.log.write_csv(out)
    }
}

fn lookup(table: &[(u32, Option<usize>)], threshold: u32) -> Option<usize> {
    table.iter().find(|(t, _)| *t == threshold).and_then(|(_, n)| *n)
}

pub fn iterations_to_completion(log: &ExplorationLog) -> Vec<(u32, Option<usize>)> {
    THRESHOLDS
        .iter()
        .map(|&t| (t, log.iterations_to(f64::from(t) / 100.0)))
        .collect()
}

pub fn run_trial(env: &PocEnvironment, cfg: &TrialConfig, opts: &TrialOptions) -> Result<TrialLog> {
    let start = env.start(cfg.start)?;
    let mut explore_cfg = ExploreConfig::new(cfg.spec.clone(), SensorModel::Disk { radius: cfg.radius });
    explore_cfg.frontier = FrontierConfig::poc(cfg.seeds.frontier);
    explore_cfg.motion = opts.motion;
    explore_cfg.path = opts.path;
    explore_cfg.eps_info = opts.eps_info;
    explore_cfg.max_iterations = opts.max_iterations;
    explore_cfg.record_timing = opts.record_timing;

    let mut grid = env.initial.clone();
    let mut mapper = PocMapper::new(&env.ground_truth, cfg.radius, cfg.noise, cfg.mapping_rng());
    let log = explore(&mut grid, &env.ground_truth, start, &explore_cfg, &mut mapper)?;
    let area = THRESHOLDS
        .iter()
        .map(|&t| (t, log.iterations_to_area(f64::from(t) / 100.0)))
        .collect();
    Ok(TrialLog {
        config: cfg.clone(),
        env_seed: env.obstacle_seed,
        iterations_to_completion: iterations_to_completion(&log),
        area_iterations_to_completion: area,
        log,
    })
}

/// A trial that could not run; the sweep records it and carries on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub config: TrialConfig,
    pub message: String,
}

pub type TrialOutcome = std::result::Result<TrialLog, TrialFailure>;

/// Run every config on `workers` threads. Output order always matches `configs`.
pub fn run_sweep(env: &PocEnvironment, configs: &[TrialConfig], opts: &TrialOptions, workers: usize) -> Result<Vec<TrialOutcome>> {
    let run = |cfg: &TrialConfig| {
        run_trial(env, cfg, opts).map_err(|e| TrialFailure {
            config: cfg.clone(),
            message: e.to_string(),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::param(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| configs.par_iter().map(run).collect()))
}

/// Cartesian product in the order radius, noise level, start, spec.
pub fn sweep_configs(
    radii: &[f64],
    noise: &[MappingNoise],
    starts: &[usize],
    specs: &[EntropySpec],
    seeds: TrialSeeds,
) -> Vec<TrialConfig> {
    let mut out = Vec::with_capacity(radii.len() * noise.len() * starts.len() * specs.len());
    for &radius in radii {
        for &n in noise {
            for &start in starts {
                for spec in specs {
                    out.push(TrialConfig {
                        radius,
                        noise: n,
                        start,
                        spec: spec.clone(),
                        seeds,
                    });
                }
            }
        }
    }
    out
}
