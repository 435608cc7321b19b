mod out;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bex_core::entropy::{prelec_weight, EntropySpec, Family, PrelecParams};
use bex_core::grid::{write_grid, GridScale};
use bex_core::poc::{
    self, generate_environment, read_summary, run_sweep, spearman, summarize, EnvConfig, MappingNoise, NoiseRanges,
    SummaryRow, SweepManifest, TrialConfig, TrialOptions, TrialSeeds, CONFIG_FORMAT, GROUP_STATS_HEADER,
};
use bex_core::simplex::{
    bernoulli_entropy_curves, bernoulli_min_entropy, min_entropy_sensitivity, perceptiveness, sensitivity,
    ParamGrid, SensitivityEstimate,
};
use bex_core::{Distribution, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};

use out::{write_atomic, CliError};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (config format bex-sweep/1)");
const OUT_DIR_ENV: &str = "BEX_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "bex", version = VERSION, about = "Behavioral entropy metrics and frontier exploration benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one entropy on one distribution.
    EntropyEval(EntropyEvalArgs),
    /// Bernoulli entropy curves (or Prelec weighting curves) as CSV.
    Curves(CurvesArgs),
    /// Monte Carlo sensitivity of one entropy over the probability simplex.
    Sensitivity(SensitivityArgs),
    /// Spread of sensitivity over a parameter grid.
    Perceptiveness(PerceptivenessArgs),
    /// Generate a benchmark environment.
    GenEnv(GenEnvArgs),
    /// Run one exploration trial and write its log.
    RunTrial(RunTrialArgs),
    /// Run every trial described by a sweep manifest.
    RunSweep(RunSweepArgs),
    /// Group statistics from a sweep summary.
    Summarize(SummarizeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Shannon,
    Renyi,
    Behavioral,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Shannon => Family::Shannon,
            FamilyArg::Renyi => Family::Renyi,
            FamilyArg::Behavioral => Family::Behavioral,
        }
    }
}

#[derive(Args, Debug)]
struct EntropyEvalArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Prelec alpha (behavioral).
    #[arg(long)]
    alpha: Option<f64>,
    /// Prelec beta; omit to condition on --m.
    #[arg(long)]
    beta: Option<f64>,
    /// Renyi order.
    #[arg(long)]
    gamma: Option<f64>,
    /// Shannon scale.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Number of outcomes.
    #[arg(long)]
    m: usize,
    /// Comma-separated probabilities.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    dist: Vec<f64>,
}

#[derive(Args, Debug)]
struct CurvesArgs {
    /// Entropy specs such as `shannon`, `renyi:2`, `behavioral:0.5`, or `renyi:inf`.
    #[arg(long = "spec", num_args = 1.., value_delimiter = ',')]
    specs: Vec<String>,
    /// Prelec weighting curves for these alphas instead of entropies.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "specs")]
    prelec: Vec<f64>,
    /// Outcome count used to condition beta for --prelec.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SensitivityArgs {
    /// Entropy spec; `renyi:inf` uses the exact min-entropy.
    #[arg(long)]
    spec: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PerceptivenessArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Log-spaced grid `lo:hi:count`.
    #[arg(long, conflicts_with = "values", required_unless_present = "values")]
    grid_log: Option<String>,
    /// Explicit comma-separated parameter values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    values: Vec<f64>,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Also write per-parameter sensitivities to this CSV.
    #[arg(long)]
    per_theta: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct EnvArgs {
    /// Environment seed.
    #[arg(long)]
    env_seed: u64,
    #[arg(long, default_value_t = 300)]
    width: usize,
    #[arg(long, default_value_t = 500)]
    height: usize,
    #[arg(long, default_value_t = 0.1)]
    resolution: f64,
}

impl EnvArgs {
    fn config(&self) -> EnvConfig {
        EnvConfig {
            width: self.width,
            height: self.height,
            resolution: self.resolution,
            ..EnvConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct GenEnvArgs {
    #[command(flatten)]
    env: EnvArgs,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RunTrialArgs {
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long)]
    mapping_seed: u64,
    #[arg(long)]
    frontier_seed: u64,
    #[arg(long)]
    spec: String,
    /// Sensor radius in world units.
    #[arg(long)]
    radius: f64,
    /// Mapping noise level 0, 1 or 2.
    #[arg(long, default_value_t = 0)]
    noise: u8,
    /// Start pose index (1-based).
    #[arg(long, default_value_t = 1)]
    start: usize,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Record wall-clock time per iteration.
    #[arg(long)]
    timing: bool,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunSweepArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args, Debug)]
struct SummarizeArgs {
    /// A summary.csv written by run-sweep.
    #[arg(long)]
    summary: PathBuf,
    /// Group by spec instead of spec group.
    #[arg(long)]
    by_spec: bool,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("error[usage]: {}", e.render().to_string().trim_start_matches("error: "));
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::EntropyEval(a) => entropy_eval(a),
        Command::Curves(a) => curves(a),
        Command::Sensitivity(a) => sensitivity_cmd(a),
        Command::Perceptiveness(a) => perceptiveness_cmd(a),
        Command::GenEnv(a) => gen_env(a),
        Command::RunTrial(a) => run_trial(a),
        Command::RunSweep(a) => run_sweep_cmd(a),
        Command::Summarize(a) => summarize_cmd(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::from_io(path, e))
}

fn entropy_eval(a: EntropyEvalArgs) -> Result<(), CliError> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::usage(format!("--{flag} is required for this family")));
    let spec = match a.family {
        FamilyArg::Shannon => Family::Shannon.member(a.k, a.m)?,
        FamilyArg::Renyi => EntropySpec::renyi(need(a.gamma, "gamma")?)?,
        FamilyArg::Behavioral => {
            let alpha = need(a.alpha, "alpha")?;
            match a.beta {
                Some(beta) => EntropySpec::Behavioral(PrelecParams::new(alpha, beta)?),
                None => EntropySpec::behavioral(alpha, a.m)?,
            }
        }
    };
    if a.dist.len() != a.m {
        return Err(CliError::usage(format!("--dist has {} entries but --m is {}", a.dist.len(), a.m)));
    }
    let d = Distribution::new(a.dist)?;
    println!("{}", spec.evaluate(&d)?);
    Ok(())
}

fn curves(a: CurvesArgs) -> Result<(), CliError> {
    let mut text = String::new();
    if !a.prelec.is_empty() {
        if a.points < 2 {
            return Err(CliError::usage("--points must be at least 2"));
        }
        text.push_str("p,alpha,beta,weight\n");
        for &alpha in &a.prelec {
            let params = PrelecParams::conditioned(alpha, a.m)?;
            for i in 0..a.points {
                let p = i as f64 / (a.points - 1) as f64;
                let w = prelec_weight(p, &params)?;
                let _ = writeln!(text, "{p},{alpha},{},{w}", params.beta());
            }
        }
    } else {
        if a.specs.is_empty() {
            return Err(CliError::usage("give --spec or --prelec"));
        }
        let mut specs = Vec::new();
        let mut with_min = false;
        for s in &a.specs {
            if s == "renyi:inf" {
                with_min = true;
            } else {
                specs.push(EntropySpec::parse(s, 2)?);
            }
        }
        text.push_str("p,spec,entropy\n");
        for pt in bernoulli_entropy_curves(&specs, a.points.max(2))? {
            let _ = writeln!(text, "{},{},{}", pt.p, pt.spec, pt.entropy);
        }
        if with_min {
            for i in 0..a.points.max(2) {
                let p = i as f64 / (a.points.max(2) - 1) as f64;
                let _ = writeln!(text, "{p},renyi:inf,{}", bernoulli_min_entropy(p)?);
            }
        }
    }
    emit(a.out.as_deref(), &text)
}

const SENSITIVITY_HEADER: &str = "family,theta,m,n,sensitivity,std_error,upper_bound";

fn sensitivity_line(s: &SensitivityEstimate) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        s.family,
        s.theta,
        s.m,
        s.n_samples,
        s.value,
        s.std_error,
        s.upper_bound()
    )
}

fn sensitivity_cmd(a: SensitivityArgs) -> Result<(), CliError> {
    let est = if a.spec == "renyi:inf" {
        min_entropy_sensitivity(a.m, a.n, a.seed)?
    } else {
        sensitivity(&EntropySpec::parse(&a.spec, a.m)?, a.m, a.n, a.seed)?
    };
    println!("{SENSITIVITY_HEADER}\n{}", sensitivity_line(&est));
    Ok(())
}

fn perceptiveness_cmd(a: PerceptivenessArgs) -> Result<(), CliError> {
    let family: Family = a.family.into();
    let grid = match &a.grid_log {
        Some(g) => {
            let parts: Vec<&str> = g.split(':').collect();
            let bad = || CliError::usage(format!("--grid-log expects lo:hi:count, got '{g}'"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = parts[0].parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].parse().map_err(|_| bad())?;
            let count: usize = parts[2].parse().map_err(|_| bad())?;
            ParamGrid::log_spaced(family, lo, hi, count)?
        }
        None => ParamGrid::new(family, a.values.clone())?,
    };
    let est = perceptiveness(&grid, a.m, a.n, a.seed)?;
    if let Some(path) = &a.per_theta {
        let mut text = format!("{SENSITIVITY_HEADER}\n");
        for s in &est.per_theta {
            text.push_str(&sensitivity_line(s));
            text.push('\n');
        }
        write_atomic(path, text.as_bytes())?;
    }
    println!("family,m,n,perceptiveness,std_error,argmax_theta,argmin_theta");
    println!(
        "{},{},{},{},{},{},{}",
        est.family, a.m, a.n, est.value, est.std_error, est.argmax_theta, est.argmin_theta
    );
    Ok(())
}

fn gen_env(a: GenEnvArgs) -> Result<(), CliError> {
    let env = generate_environment(a.env.env_seed, &a.env.config())?;
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::from_io(&a.out, e))?;
    write_atomic(&a.out.join("ground_truth.grid"), write_grid(&env.ground_truth, GridScale::Prob).as_bytes())?;
    write_atomic(&a.out.join("initial.grid"), write_grid(&env.initial, GridScale::Prob).as_bytes())?;
    let mut starts = String::from("start,x,y\n");
    for (i, s) in env.starts.iter().enumerate() {
        let _ = writeln!(starts, "{},{},{}", i + 1, s.x, s.y);
    }
    write_atomic(&a.out.join("starts.csv"), starts.as_bytes())?;
    let mut obstacles = String::from("obstacle,vertex,x,y\n");
    for (i, poly) in env.obstacles.iter().enumerate() {
        for (j, (x, y)) in poly.iter().enumerate() {
            let _ = writeln!(obstacles, "{i},{j},{x},{y}");
        }
    }
    write_atomic(&a.out.join("obstacles.csv"), obstacles.as_bytes())?;
    eprintln!("wrote environment to {}", a.out.display());
    Ok(())
}

fn run_trial(a: RunTrialArgs) -> Result<(), CliError> {
    let env = generate_environment(a.env.env_seed, &a.env.config())?;
    let cfg = TrialConfig {
        radius: a.radius,
        noise: MappingNoise::level(a.noise, &NoiseRanges::default())?,
        start: a.start,
        spec: EntropySpec::parse(&a.spec, 2)?,
        seeds: TrialSeeds {
            mapping: a.mapping_seed,
            frontier: a.frontier_seed,
        },
    };
    let mut opts = TrialOptions {
        record_timing: a.timing,
        ..TrialOptions::default()
    };
    if a.max_iterations.is_some() {
        opts.max_iterations = a.max_iterations;
    }
    let log = poc::run_trial(&env, &cfg, &opts)?;
    let mut buf = Vec::new();
    log.write_csv(&mut buf).map_err(CliError::io)?;
    emit(a.out.as_deref(), &String::from_utf8_lossy(&buf))?;
    eprintln!(
        "{}: {} after {} iterations, entropy completion {}",
        cfg.slug(),
        log.log.termination,
        log.log.iterations(),
        log.log.last().pct_entropy_complete
    );
    Ok(())
}

fn run_sweep_cmd(a: RunSweepArgs) -> Result<(), CliError> {
    let text = read_input(&a.manifest)?;
    let manifest = SweepManifest::parse(&text)?;
    let env = manifest.build_environment()?;
    let configs = manifest.configs()?;
    let opts = manifest.options()?;
    let trials_dir = a.out.join("trials");
    std::fs::create_dir_all(&trials_dir).map_err(|e| CliError::from_io(&trials_dir, e))?;
    eprintln!("running {} trials on {} worker(s)", configs.len(), a.workers.max(1));
    let outcomes = run_sweep(&env, &configs, &opts, a.workers)?;
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut failures = 0;
    for (i, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Ok(t) => {
                let mut buf = Vec::new();
                t.write_csv(&mut buf).map_err(CliError::io)?;
                let path = trials_dir.join(format!("trial_{i:04}_{}.csv", t.config.slug()));
                write_atomic(&path, &buf)?;
            }
            Err(f) => {
                failures += 1;
                eprintln!("trial {i} ({}) failed: {}", f.config.slug(), f.message);
            }
        }
        rows.push(SummaryRow::from_outcome(outcome));
    }
    let mut buf = Vec::new();
    poc::write_summary(&rows, &mut buf).map_err(CliError::io)?;
    write_atomic(&a.out.join("summary.csv"), &buf)?;
    eprintln!(
        "wrote {} trial logs and summary.csv to {} ({failures} failed, format {CONFIG_FORMAT})",
        outcomes.len() - failures,
        a.out.display()
    );
    Ok(())
}

fn summarize_cmd(a: SummarizeArgs) -> Result<(), CliError> {
    let rows = read_summary(&read_input(&a.summary)?)?;
    let mut text = format!("{GROUP_STATS_HEADER}\n");
    for s in summarize(&rows, a.by_spec) {
        text.push_str(&s.csv_line());
        text.push('\n');
    }
    emit(a.out.as_deref(), &text)?;
    let (ent, area): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| Some((r.iterations_to(99)? as f64, r.area_iterations_to(99)? as f64)))
        .unzip();
    match spearman(&ent, &area) {
        Some(rho) => eprintln!("rank correlation of iterations to 99% (entropy vs area): {rho} over {} trials", ent.len()),
        None => eprintln!("rank correlation unavailable: too few trials reached 99% on both metrics"),
    }
    Ok(())
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::core(e)
    }
}
