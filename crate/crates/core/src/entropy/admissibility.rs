//! Randomized checks of continuity, maximality and expansibility.

use rand::Rng;

use super::{Distribution, EntropySpec};
use crate::error::{Error, Result};
use crate::simplex::SimplexSampler;

const MAXIMALITY_TOL: f64 = 1e-9;
const EXPANSIBILITY_TOL: f64 = 1e-12;
/// Samples farther than this (max-norm) from uniform must be strictly below the uniform entropy.
const STRICT_RADIUS: f64 = 1e-4;
/// Relative perturbation sizes for the continuity probe, largest first.
const CONTINUITY_STEPS: [f64; 3] = [1e-4, 1e-6, 1e-8];
const CONTINUITY_FINAL_BOUND: f64 = 1e-6;
/// `|H(p + step) - H(p)|` must stay below this multiple of the relative step.
const CONTINUITY_SLOPE: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub maximality_ok: bool,
    pub expansibility_ok: bool,
    pub continuity_ok: bool,
    /// False for Behavioral specs with a free beta; such specs are not admissible by construction.
    pub conditioned: bool,
    pub uniform_entropy: f64,
    /// Largest `H(p) - H(uniform)` observed.
    pub max_excess: f64,
    pub max_expansion_change: f64,
    /// Largest `|H(p + step) - H(p)|` at the smallest probe step.
    pub max_final_difference: f64,
    pub details: Vec<String>,
}

impl AdmissibilityReport {
    pub fn all_ok(&self) -> bool {
        self.maximality_ok && self.expansibility_ok && self.continuity_ok
    }
}

/// Probe `spec` on `n_samples` distributions drawn uniformly from the `m`-simplex.
///
/// Axiom failures are reported, never raised. Errors only come from invalid inputs.
pub fn check_admissibility(
    spec: &EntropySpec,
    m: usize,
    n_samples: usize,
    seed: u64,
) -> Result<AdmissibilityReport> {
    if m < 2 {
        return Err(Error::OutcomeCount(m));
    }
    if let EntropySpec::BehavioralConditioned { outcomes, .. } = spec {
        if *outcomes != m {
            return Err(Error::param(format!(
                "spec conditioned to {outcomes} outcomes cannot be checked at M={m}"
            )));
        }
    }
    let eval = spec.evaluator()?;
    let uniform = Distribution::uniform(m)?;
    let h_uniform = eval.eval(uniform.probs());

    let mut report = AdmissibilityReport {
        maximality_ok: true,
        expansibility_ok: true,
        continuity_ok: true,
        conditioned: spec.is_conditioned(),
        uniform_entropy: h_uniform,
        max_excess: f64::NEG_INFINITY,
        max_expansion_change: 0.0,
        max_final_difference: 0.0,
        details: Vec::new(),
    };
    if !report.conditioned {
        report
            .details
            .push("behavioral spec with free beta: not admissible by construction".into());
    }

    let mut sampler = SimplexSampler::new(m, seed);
    let mut rng = sampler.aux_rng();
    let mut p = vec![0.0; m];
    let mut q = vec![0.0; m + 1];
    let mut perturbed = vec![0.0; m];
    let inv_m = 1.0 / m as f64;

    for i in 0..n_samples {
        sampler.fill(&mut p);
        let h = eval.eval(&p);
        if !h.is_finite() {
            report.continuity_ok = false;
            push_detail(&mut report.details, format!("sample {i}: non-finite entropy {h}"));
            continue;
        }

        let excess = h - h_uniform;
        report.max_excess = report.max_excess.max(excess);
        let dist = p.iter().map(|x| (x - inv_m).abs()).fold(0.0, f64::max);
        if excess > MAXIMALITY_TOL || (dist > STRICT_RADIUS && excess >= 0.0) {
            if report.maximality_ok {
                push_detail(
                    &mut report.details,
                    format!("maximality: H({p:?}) = {h} exceeds uniform {h_uniform}"),
                );
            }
            report.maximality_ok = false;
        }

        let at = rng.random_range(0..=m);
        q[..at].copy_from_slice(&p[..at]);
        q[at] = 0.0;
        q[at + 1..].copy_from_slice(&p[at..]);
        let change = (eval.eval(&q) - h).abs();
        report.max_expansion_change = report.max_expansion_change.max(change);
        if change >= EXPANSIBILITY_TOL {
            if report.expansibility_ok {
                push_detail(
                    &mut report.details,
                    format!("expansibility: zero outcome changed H by {change}"),
                );
            }
            report.expansibility_ok = false;
        }

        // Move mass between two outcomes at shrinking relative steps. The
        // differences must stay under a linear envelope in the step.
        let a = rng.random_range(0..m);
        let b = (a + 1 + rng.random_range(0..m - 1)) % m;
        let base = p[a].min(p[b]);
        if base <= 0.0 {
            continue;
        }
        let mut prev = f64::INFINITY;
        for rel in CONTINUITY_STEPS {
            perturbed.copy_from_slice(&p);
            let step = rel * base;
            perturbed[a] -= step;
            perturbed[b] += step;
            let diff = (eval.eval(&perturbed) - h).abs();
            if !(diff <= CONTINUITY_SLOPE * rel + 1e-12) {
                if report.continuity_ok {
                    push_detail(
                        &mut report.details,
                        format!("continuity: difference {diff} at relative step {rel}"),
                    );
                }
                report.continuity_ok = false;
            }
            prev = diff;
        }
        report.max_final_difference = report.max_final_difference.max(prev);
        if prev > CONTINUITY_FINAL_BOUND {
            if report.continuity_ok {
                push_detail(
                    &mut report.details,
                    format!("continuity: difference {prev} at the smallest step"),
                );
            }
            report.continuity_ok = false;
        }
    }
    Ok(report)
}

fn push_detail(details: &mut Vec<String>, msg: String) {
    if details.len() < 16 {
        details.push(msg);
    }
}
