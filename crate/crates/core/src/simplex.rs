//! Monte Carlo integration of entropies over the probability simplex.
//!
//! Sensitivity is the integral of an entropy over the `M`-simplex under its
//! Lebesgue measure, estimated as the sample mean over uniform draws times the
//! simplex volume `1/(M-1)!`. Perceptiveness is the spread (max - min) of
//! sensitivity across a family's parameter grid.
//!
//! Uniform draws come from normalizing `M` i.i.d. standard exponentials.
//! Samples are generated in fixed-size chunks, each from its own ChaCha
//! stream keyed by `(seed, chunk index)`, so results do not depend on how many
//! threads evaluate them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::entropy::{min_entropy, Distribution, EntropySpec, Evaluator, Family, RENYI_EXCLUSION};
use crate::error::{Error, Result};

/// Samples per RNG stream.
pub const CHUNK: usize = 1 << 14;
const AUX_STREAM: u64 = u64::MAX;

/// Volume of the probability simplex with `m` outcomes, `1/(m-1)!`.
pub fn simplex_volume(m: usize) -> f64 {
    (1..m).fold(1.0, |acc, k| acc / k as f64)
}

/// Sequential uniform sampler over the `m`-simplex.
#[derive(Debug, Clone)]
pub struct SimplexSampler {
    m: usize,
    seed: u64,
    chunk: u64,
    used: usize,
    rng: ChaCha8Rng,
}

impl SimplexSampler {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            m,
            seed,
            chunk: 0,
            used: 0,
            rng: stream_rng(seed, 0),
        }
    }

    /// An RNG independent of the sample streams, for callers needing extra randomness.
    pub fn aux_rng(&self) -> ChaCha8Rng {
        stream_rng(self.seed, AUX_STREAM)
    }

    /// Write the next sample into `out` (length `m`).
    pub fn fill(&mut self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.m);
        if self.used == CHUNK {
            self.chunk += 1;
            self.used = 0;
            self.rng = stream_rng(self.seed, self.chunk);
        }
        draw(&mut self.rng, out);
        self.used += 1;
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[inline]
fn draw(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut sum = 0.0;
    for x in out.iter_mut() {
        let e: f64 = rng.sample(Exp1);
        *x = e;
        sum += e;
    }
    for x in out.iter_mut() {
        *x /= sum;
    }
}

/// `n` uniform samples from the `m`-simplex stored row-major.
#[derive(Debug, Clone)]
pub struct SimplexSample {
    m: usize,
    data: Vec<f64>,
}

impl SimplexSample {
    pub fn generate(m: usize, n: usize, seed: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::OutcomeCount(m));
        }
        if n == 0 {
            return Err(Error::param("sample count must be at least 1"));
        }
        let mut data = vec![0.0; m * n];
        data.par_chunks_mut(CHUNK * m)
            .enumerate()
            .for_each(|(c, block)| {
                let mut rng = stream_rng(seed, c as u64);
                for row in block.chunks_exact_mut(m) {
                    draw(&mut rng, row);
                }
            });
        Ok(Self { m, data })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.m)
    }

    /// Mean of `f` over the sample and its standard error.
    pub fn mean_of<F>(&self, f: F) -> (f64, f64)
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        let values: Vec<f64> = self.data.par_chunks(self.m).map(f).collect();
        mean_and_error(&values)
    }
}

fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `n` i.i.d. uniform distributions over `m` outcomes.
pub fn sample_simplex(m: usize, n: usize, seed: u64) -> Result<Vec<Distribution>> {
    let sample = SimplexSample::generate(m, n, seed)?;
    sample
        .rows()
        .map(|r| Distribution::new(r.to_vec()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityEstimate {
    pub family: Family,
    pub theta: f64,
    /// Nats times simplex volume.
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub m: usize,
}

impl SensitivityEstimate {
    /// Upper bound `ln(M)/(M-1)!` for entropies bounded by `ln M`.
    pub fn upper_bound(&self) -> f64 {
        (self.m as f64).ln() * simplex_volume(self.m)
    }
}

fn metric_evaluator(spec: &EntropySpec, m: usize) -> Result<Evaluator> {
    match *spec {
        EntropySpec::Behavioral(_) => {
            return Err(Error::param(
                "unconditioned behavioral entropy is not bounded by ln M; condition it first",
            ))
        }
        EntropySpec::BehavioralConditioned { outcomes, .. } if outcomes != m => {
            return Err(Error::param(format!(
                "spec conditioned to {outcomes} outcomes used at M={m}"
            )))
        }
        EntropySpec::Shannon { k } if k != 1.0 => {
            return Err(Error::param("Shannon scale must be 1 so the entropy is bounded by ln M"))
        }
        _ => {}
    }
    spec.evaluator()
}

/// Sensitivity of `spec` estimated on a shared sample.
pub fn sensitivity_on(spec: &EntropySpec, sample: &SimplexSample) -> Result<SensitivityEstimate> {
    let eval = metric_evaluator(spec, sample.m())?;
    let (mean, se) = sample.mean_of(|p| eval.eval(p));
    let vol = simplex_volume(sample.m());
    Ok(SensitivityEstimate {
        family: spec.family(),
        theta: spec.theta(),
        value: mean * vol,
        std_error: se * vol,
        n_samples: sample.len(),
        m: sample.m(),
    })
}

pub fn sensitivity(spec: &EntropySpec, m: usize, n: usize, seed: u64) -> Result<SensitivityEstimate> {
    metric_evaluator(spec, m)?;
    let sample = SimplexSample::generate(m, n, seed)?;
    sensitivity_on(spec, &sample)
}

/// Sensitivity of `-ln max p`, the infinite-order Renyi limit, evaluated exactly per sample.
pub fn min_entropy_sensitivity(m: usize, n: usize, seed: u64) -> Result<SensitivityEstimate> {
    let sample = SimplexSample::generate(m, n, seed)?;
    let (mean, se) = sample.mean_of(|p| {
        let max = p.iter().copied().fold(0.0, f64::max);
        -max.ln()
    });
    let vol = simplex_volume(m);
    Ok(SensitivityEstimate {
        family: Family::Renyi,
        theta: f64::INFINITY,
        value: mean * vol,
        std_error: se * vol,
        n_samples: n,
        m,
    })
}

/// Increasing parameter values for one entropy family.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    family: Family,
    values: Vec<f64>,
}

impl ParamGrid {
    pub fn new(family: Family, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("parameter grid is empty"));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("parameter grid must be strictly increasing"));
        }
        for &v in &values {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("grid value {v} is not a positive real")));
            }
            if family == Family::Renyi && (v - 1.0).abs() <= RENYI_EXCLUSION {
                return Err(Error::RenyiNearOne(v));
            }
        }
        if family == Family::Shannon && values != [1.0] {
            return Err(Error::param("the Shannon family has the single member k=1"));
        }
        Ok(Self { family, values })
    }

    /// `count` log-spaced values from `lo` to `hi` inclusive. Renyi grids drop
    /// any point within the excluded neighbourhood of 1.
    pub fn log_spaced(family: Family, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && count >= 1) {
            return Err(Error::param(format!(
                "log grid needs 0 < lo <= hi and count >= 1 (got {lo}:{hi}:{count})"
            )));
        }
        let values: Vec<f64> = if count == 1 {
            vec![lo]
        } else {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    i if i == count - 1 => hi,
                    i => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
                })
                .filter(|v| family != Family::Renyi || (v - 1.0).abs() > RENYI_EXCLUSION)
                .collect()
        };
        Self::new(family, values)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptivenessEstimate {
    pub family: Family,
    /// `max - min` of the per-theta sensitivities.
    pub value: f64,
    /// Standard errors of the two extremes combined in quadrature.
    pub std_error: f64,
    pub argmax_theta: f64,
    pub argmin_theta: f64,
    pub per_theta: Vec<SensitivityEstimate>,
}

/// Spread of sensitivity over `grid`. Every member is evaluated on the same sample.
pub fn perceptiveness(grid: &ParamGrid, m: usize, n: usize, seed: u64) -> Result<PerceptivenessEstimate> {
    let specs: Vec<EntropySpec> = grid
        .values()
        .iter()
        .map(|&t| grid.family().member(t, m))
        .collect::<Result<_>>()?;
    for s in &specs {
        metric_evaluator(s, m)?;
    }
    let sample = SimplexSample::generate(m, n, seed)?;
    let per_theta: Vec<SensitivityEstimate> = specs
        .iter()
        .map(|s| sensitivity_on(s, &sample))
        .collect::<Result<_>>()?;

    let (mut imax, mut imin) = (0, 0);
    for (i, s) in per_theta.iter().enumerate() {
        if s.value > per_theta[imax].value {
            imax = i;
        }
        if s.value < per_theta[imin].value {
            imin = i;
        }
    }
    let (hi, lo) = (&per_theta[imax], &per_theta[imin]);
    let std_error = if imax == imin {
        0.0
    } else {
        hi.std_error.hypot(lo.std_error)
    };
    Ok(PerceptivenessEstimate {
        family: grid.family(),
        value: hi.value - lo.value,
        std_error,
        argmax_theta: hi.theta,
        argmin_theta: lo.theta,
        per_theta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub p: f64,
    pub spec: EntropySpec,
    pub entropy: f64,
}

/// Entropy of `(p, 1-p)` on the grid `p = 0, 1/(g-1), ..., 1` for each spec.
pub fn bernoulli_entropy_curves(specs: &[EntropySpec], grid_points: usize) -> Result<Vec<CurvePoint>> {
    if grid_points < 2 {
        return Err(Error::param("a curve needs at least 2 grid points"));
    }
    let mut out = Vec::with_capacity(specs.len() * grid_points);
    for spec in specs {
        let eval = spec.evaluator()?;
        for i in 0..grid_points {
            let p = i as f64 / (grid_points - 1) as f64;
            out.push(CurvePoint {
                p,
                spec: *spec,
                entropy: eval.bernoulli(p),
            });
        }
    }
    Ok(out)
}

/// Entropy of `(p, 1 - p)` under the infinite-order Renyi limit.
pub fn bernoulli_min_entropy(p: f64) -> Result<f64> {
    Ok(min_entropy(&Distribution::bernoulli(p)?))
}
