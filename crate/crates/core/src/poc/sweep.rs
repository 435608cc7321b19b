//! Sweep manifests, summary CSVs and group statistics.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    generate_environment, sweep_configs, EnvConfig, MappingNoise, PocEnvironment, TrialOptions, TrialOutcome,
    TrialSeeds, TrialConfig, DEFAULT_TRIAL_ITERATIONS, THRESHOLDS,
};
use crate::entropy::EntropySpec;
use crate::error::{Error, Result};
use crate::explore::{Motion, PathModel, DEFAULT_EPS_INFO};

pub const CONFIG_FORMAT: &str = "bex-sweep/1";
pub const SUMMARY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    pub environment: u64,
    pub mapping: u64,
    pub frontier: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub radii: Vec<f64>,
    pub noise_levels: Vec<u8>,
    pub starts: Vec<usize>,
    pub specs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialOptionsSection {
    pub eps_info: f64,
    pub max_iterations: Option<usize>,
    /// `straight` or `teleport`.
    pub motion: String,
    /// `euclidean` or `grid`.
    pub path: String,
    /// Record wall-clock time per iteration (makes logs non-reproducible).
    pub timing: bool,
}

impl Default for TrialOptionsSection {
    fn default() -> Self {
        Self {
            eps_info: DEFAULT_EPS_INFO,
            max_iterations: Some(DEFAULT_TRIAL_ITERATIONS),
            motion: "straight".into(),
            path: "euclidean".into(),
            timing: false,
        }
    }
}

/// Upper ends of the mapping step for noise levels 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseRanges {
    pub level1: f64,
    pub level2: f64,
}

impl Default for NoiseRanges {
    fn default() -> Self {
        Self {
            level1: 0.35,
            level2: 0.15,
        }
    }
}

/// TOML sweep description.
///
/// ```toml
/// format = "bex-sweep/1"
///
/// [seeds]
/// environment = 7
/// mapping = 11
/// frontier = 13
///
/// [sweep]
/// radii = [2, 3, 4, 5]
/// noise_levels = [0, 1, 2]
/// starts = [1, 2, 3, 4, 5]
/// specs = ["shannon", "renyi:2", "behavioral:0.5"]
/// ```
///
/// Optional sections: `[environment]` (see [`EnvConfig`]), `[trial]` and `[noise]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepManifest {
    pub format: String,
    pub seeds: SeedSection,
    #[serde(default)]
    pub environment: EnvConfig,
    pub sweep: SweepSection,
    #[serde(default)]
    pub trial: TrialOptionsSection,
    #[serde(default)]
    pub noise: NoiseRanges,
}

impl SweepManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: SweepManifest = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if m.format != CONFIG_FORMAT {
            return Err(Error::Config(format!(
                "unsupported format '{}', expected '{CONFIG_FORMAT}'",
                m.format
            )));
        }
        m.environment.validate().map_err(|e| Error::Config(e.to_string()))?;
        m.configs()?;
        m.options()?;
        Ok(m)
    }

    pub fn specs(&self) -> Result<Vec<EntropySpec>> {
        self.sweep
            .specs
            .iter()
            .map(|s| EntropySpec::parse(s, 2).map_err(|e| Error::Config(format!("spec '{s}': {e}"))))
            .collect()
    }

    pub fn configs(&self) -> Result<Vec<TrialConfig>> {
        let s = &self.sweep;
        if s.radii.is_empty() || s.noise_levels.is_empty() || s.starts.is_empty() || s.specs.is_empty() {
            return Err(Error::Config("sweep lists must all be non-empty".into()));
        }
        if let Some(r) = s.radii.iter().find(|r| !(**r > 0.0)) {
            return Err(Error::Config(format!("radius must be > 0, got {r}")));
        }
        let noise = s
            .noise_levels
            .iter()
            .map(|&l| MappingNoise::level(l, &self.noise).map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let n_starts = self.environment.start_poses().len();
        if let Some(x) = s.starts.iter().find(|&&x| x == 0 || x > n_starts) {
            return Err(Error::Config(format!("start {x} outside 1..={n_starts}")));
        }
        let seeds = TrialSeeds {
            mapping: self.seeds.mapping,
            frontier: self.seeds.frontier,
        };
        Ok(sweep_configs(&s.radii, &noise, &s.starts, &self.specs()?, seeds))
    }

    pub fn options(&self) -> Result<TrialOptions> {
        let t = &self.trial;
        let motion = match t.motion.as_str() {
            "straight" => Motion::StraightLine,
            "teleport" => Motion::Teleport,
            other => return Err(Error::Config(format!("unknown motion '{other}'"))),
        };
        let path = match t.path.as_str() {
            "euclidean" => PathModel::Euclidean,
            "grid" => PathModel::Grid,
            other => return Err(Error::Config(format!("unknown path model '{other}'"))),
        };
        if !(t.eps_info >= 0.0) {
            return Err(Error::Config(format!("eps_info must be >= 0, got {}", t.eps_info)));
        }
        Ok(TrialOptions {
            eps_info: t.eps_info,
            max_iterations: t.max_iterations,
            motion,
            path,
            record_timing: t.timing,
        })
    }

    pub fn build_environment(&self) -> Result<PocEnvironment> {
        generate_environment(self.seeds.environment, &self.environment)
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub spec: String,
    pub group: String,
    pub radius: f64,
    pub sigma_m: u8,
    pub start: usize,
    /// Termination reason, or `error`.
    pub termination: String,
    pub iterations: Option<usize>,
    pub final_pct_entropy: Option<f64>,
    pub final_pct_area: Option<f64>,
    pub iterations_to: [Option<usize>; 5],
    pub area_iterations_to: [Option<usize>; 5],
    pub error: String,
}

impl SummaryRow {
    pub fn from_outcome(outcome: &TrialOutcome) -> Self {
        let cfg = match outcome {
            Ok(t) => &t.config,
            Err(f) => &f.config,
        };
        let mut row = SummaryRow {
            spec: cfg.spec.to_string(),
            group: cfg.group().label().into(),
            radius: cfg.radius,
            sigma_m: cfg.noise.level,
            start: cfg.start,
            termination: "error".into(),
            iterations: None,
            final_pct_entropy: None,
            final_pct_area: None,
            iterations_to: [None; 5],
            area_iterations_to: [None; 5],
            error: String::new(),
        };
        match outcome {
            Ok(t) => {
                row.termination = t.log.termination.to_string();
                row.iterations = Some(t.log.iterations());
                row.final_pct_entropy = Some(t.log.last().pct_entropy_complete);
                row.final_pct_area = Some(t.log.last().pct_area_correct);
                for (k, &th) in THRESHOLDS.iter().enumerate() {
                    row.iterations_to[k] = t.iterations_to(th);
                    row.area_iterations_to[k] = t.area_iterations_to(th);
                }
            }
            Err(f) => row.error = f.message.replace([',', '\n', '\r'], ";"),
        }
        row
    }

    pub fn iterations_to(&self, threshold: u32) -> Option<usize> {
        THRESHOLDS.iter().position(|&t| t == threshold).and_then(|k| self.iterations_to[k])
    }

    pub fn area_iterations_to(&self, threshold: u32) -> Option<usize> {
        THRESHOLDS.iter().position(|&t| t == threshold).and_then(|k| self.area_iterations_to[k])
    }
}

fn summary_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "format_version",
        "spec",
        "spec_group",
        "r",
        "sigma_m",
        "start",
        "termination",
        "iterations",
        "final_pct_entropy",
        "final_pct_area",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(THRESHOLDS.iter().map(|t| format!("iterations_to_{t}")));
    h.extend(THRESHOLDS.iter().map(|t| format!("area_iterations_to_{t}")));
    h.push("error".into());
    h
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", summary_header().join(","))?;
    for r in rows {
        let mut fields = vec![
            SUMMARY_FORMAT_VERSION.to_string(),
            r.spec.clone(),
            r.group.clone(),
            r.radius.to_string(),
            r.sigma_m.to_string(),
            r.start.to_string(),
            r.termination.clone(),
            opt(r.iterations),
            opt(r.final_pct_entropy),
            opt(r.final_pct_area),
        ];
        fields.extend(r.iterations_to.iter().map(|v| opt(*v)));
        fields.extend(r.area_iterations_to.iter().map(|v| opt(*v)));
        fields.push(r.error.clone());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn read_summary(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Format("empty summary".into()))?
        .split(',')
        .collect();
    let col = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Format(format!("summary is missing column '{name}'")))
    };
    let idx: BTreeMap<String, usize> = summary_header()
        .into_iter()
        .map(|name| col(&name).map(|i| (name, i)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != header.len() {
            return Err(Error::Format(format!("summary line {} has {} fields, expected {}", n + 2, f.len(), header.len())));
        }
        let get = |name: &str| f[idx[name]];
        let version = get("format_version");
        if version != SUMMARY_FORMAT_VERSION.to_string() {
            return Err(Error::Format(format!("unsupported summary format_version '{version}'")));
        }
        let bad = |name: &str| Error::Format(format!("summary line {}: bad {name}", n + 2));
        let num = |name: &str| -> Result<f64> { get(name).parse().map_err(|_| bad(name)) };
        let opt_usize = |name: &str| -> Result<Option<usize>> {
            let s = get(name);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(name))
            }
        };
        let opt_f64 = |name: &str| -> Result<Option<f64>> {
            let s = get(name);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(name))
            }
        };
        let mut to = [None; 5];
        let mut area_to = [None; 5];
        for (k, t) in THRESHOLDS.iter().enumerate() {
            to[k] = opt_usize(&format!("iterations_to_{t}"))?;
            area_to[k] = opt_usize(&format!("area_iterations_to_{t}"))?;
        }
        rows.push(SummaryRow {
            spec: get("spec").into(),
            group: get("spec_group").into(),
            radius: num("r")?,
            sigma_m: get("sigma_m").parse().map_err(|_| bad("sigma_m"))?,
            start: get("start").parse().map_err(|_| bad("start"))?,
            termination: get("termination").into(),
            iterations: opt_usize("iterations")?,
            final_pct_entropy: opt_f64("final_pct_entropy")?,
            final_pct_area: opt_f64("final_pct_area")?,
            iterations_to: to,
            area_iterations_to: area_to,
            error: get("error").into(),
        });
    }
    Ok(rows)
}

/// Iterations-to-threshold statistics over the trials that reached it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub group: String,
    pub threshold: u32,
    pub trials: usize,
    pub reached: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub min: Option<usize>,
    pub max: Option<usize>,
}

pub const GROUP_STATS_HEADER: &str = "format_version,group,threshold,trials,reached,mean,median,min,max";

impl GroupStats {
    pub fn csv_line(&self) -> String {
        format!(
            "{SUMMARY_FORMAT_VERSION},{},{},{},{},{},{},{},{}",
            self.group,
            self.threshold,
            self.trials,
            self.reached,
            opt(self.mean),
            opt(self.median),
            opt(self.min),
            opt(self.max)
        )
    }
}

/// Statistics per key for each threshold. `by_spec` groups by spec label
/// instead of spec group. Failed trials are excluded.
pub fn summarize(rows: &[SummaryRow], by_spec: bool) -> Vec<GroupStats> {
    let mut groups: BTreeMap<&str, Vec<&SummaryRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.termination != "error") {
        let key = if by_spec { r.spec.as_str() } else { r.group.as_str() };
        groups.entry(key).or_default().push(r);
    }
    let mut out = Vec::new();
    for (key, members) in groups {
        for (k, &th) in THRESHOLDS.iter().enumerate() {
            let mut v: Vec<usize> = members.iter().filter_map(|r| r.iterations_to[k]).collect();
            v.sort_unstable();
            let n = v.len();
            let median = (n > 0).then(|| {
                if n % 2 == 1 {
                    v[n / 2] as f64
                } else {
                    (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
                }
            });
            out.push(GroupStats {
                group: key.to_string(),
                threshold: th,
                trials: members.len(),
                reached: n,
                mean: (n > 0).then(|| v.iter().sum::<usize>() as f64 / n as f64),
                median,
                min: v.first().copied(),
                max: v.last().copied(),
            });
        }
    }
    out
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            r[o] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties. `None` if either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}
