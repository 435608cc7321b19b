//! Shannon, Renyi and Behavioral entropy over discrete distributions.
//!
//! Logs are natural throughout, so every value is in nats. The convention
//! `0 ln 0 = 0` applies to all three families.

mod admissibility;
mod prelec;

use std::fmt;
use std::str::FromStr;

pub use admissibility::{check_admissibility, AdmissibilityReport};
pub use prelec::{
    condition_beta, condition_beta_real, prelec_fixed_point, prelec_weight, FixedPoint,
    PrelecParams, PROB_FLOOR,
};

use crate::error::{Error, Result};

/// Tolerance on `sum(p) == 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;
/// Renyi orders with `|gamma - 1|` at or below this are rejected.
pub const RENYI_EXCLUSION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidDistribution(format!(
                "entry {bad} outside [0, 1]"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        Ok(Self {
            probs: vec![1.0 / m as f64; m],
        })
    }

    /// `(p, 1 - p)`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityDomain(p));
        }
        Ok(Self {
            probs: vec![p, 1.0 - p],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// The same distribution with an impossible outcome inserted at `at`.
    pub fn with_zero_outcome(&self, at: usize) -> Self {
        let mut probs = self.probs.clone();
        probs.insert(at.min(probs.len()), 0.0);
        Self { probs }
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.probs
    }
}

/// Prelec weights of each outcome. Not renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
}

pub fn prelec_weights(d: &Distribution, params: &PrelecParams) -> WeightVector {
    WeightVector {
        weights: d.probs.iter().map(|&p| params.weight(p)).collect(),
    }
}

#[inline]
pub(crate) fn neg_xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

pub fn shannon_entropy(d: &Distribution, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::param(format!("Shannon scale k must be > 0, got {k}")));
    }
    Ok(k * shannon_raw(&d.probs))
}

pub fn renyi_entropy(d: &Distribution, gamma: f64) -> Result<f64> {
    check_renyi(gamma)?;
    Ok(renyi_raw(&d.probs, gamma))
}

/// `-ln max_i p_i`, the Renyi limit as the order goes to infinity.
pub fn min_entropy(d: &Distribution) -> f64 {
    min_entropy_raw(&d.probs)
}

/// `-sum w(p_i) ln w(p_i)`.
pub fn behavioral_entropy(d: &Distribution, params: &PrelecParams) -> f64 {
    behavioral_raw(&d.probs, params.alpha(), params.ln_beta())
}

fn check_renyi(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::param(format!("Renyi order must be > 0, got {gamma}")));
    }
    if (gamma - 1.0).abs() <= RENYI_EXCLUSION {
        return Err(Error::RenyiNearOne(gamma));
    }
    Ok(())
}

#[inline]
fn shannon_raw(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| neg_xlnx(p)).sum()
}

#[inline]
fn min_entropy_raw(probs: &[f64]) -> f64 {
    let max = probs.iter().copied().fold(0.0, f64::max);
    0.0 - max.ln()
}

// ln sum p^g is computed relative to the largest entry so that huge orders
// do not underflow every term to zero.
#[inline]
fn renyi_raw(probs: &[f64], gamma: f64) -> f64 {
    let max = probs.iter().copied().fold(0.0, f64::max);
    let ln_max = max.ln();
    let tail: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| (gamma * (p.ln() - ln_max)).exp())
        .sum();
    (gamma * ln_max + tail.ln()) / (1.0 - gamma) + 0.0
}

#[inline]
fn behavioral_raw(probs: &[f64], alpha: f64, ln_beta: f64) -> f64 {
    probs
        .iter()
        .map(|&p| neg_xlnx(prelec::weight_raw(p, alpha, ln_beta)))
        .sum()
}

/// Which entropy family a spec belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Shannon,
    Renyi,
    /// Behavioral entropy conditioned to the outcome count.
    Behavioral,
}

impl Family {
    /// The family member at parameter `theta`, conditioned to `outcomes` where relevant.
    pub fn member(self, theta: f64, outcomes: usize) -> Result<EntropySpec> {
        match self {
            Family::Shannon => {
                let spec = EntropySpec::Shannon { k: theta };
                spec.validate()?;
                Ok(spec)
            }
            Family::Renyi => EntropySpec::renyi(theta),
            Family::Behavioral => EntropySpec::behavioral(theta, outcomes),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Shannon => "shannon",
            Family::Renyi => "renyi",
            Family::Behavioral => "behavioral",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "shannon" => Ok(Family::Shannon),
            "renyi" => Ok(Family::Renyi),
            "behavioral" | "behavioural" => Ok(Family::Behavioral),
            other => Err(Error::param(format!("unknown entropy family '{other}'"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropySpec {
    Shannon { k: f64 },
    Renyi { gamma: f64 },
    /// Behavioral entropy with a free `beta`; not admissible in general.
    Behavioral(PrelecParams),
    /// Behavioral entropy with `beta` resolved so that the fixed point is `1/outcomes`.
    BehavioralConditioned { alpha: f64, outcomes: usize },
}

impl EntropySpec {
    pub fn shannon() -> Self {
        EntropySpec::Shannon { k: 1.0 }
    }

    pub fn renyi(gamma: f64) -> Result<Self> {
        check_renyi(gamma)?;
        Ok(EntropySpec::Renyi { gamma })
    }

    pub fn behavioral(alpha: f64, outcomes: usize) -> Result<Self> {
        let spec = EntropySpec::BehavioralConditioned { alpha, outcomes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.evaluator().map(|_| ())
    }

    pub fn family(&self) -> Family {
        match self {
            EntropySpec::Shannon { .. } => Family::Shannon,
            EntropySpec::Renyi { .. } => Family::Renyi,
            EntropySpec::Behavioral(_) | EntropySpec::BehavioralConditioned { .. } => {
                Family::Behavioral
            }
        }
    }

    /// The family parameter: `k`, `gamma` or `alpha`.
    pub fn theta(&self) -> f64 {
        match *self {
            EntropySpec::Shannon { k } => k,
            EntropySpec::Renyi { gamma } => gamma,
            EntropySpec::Behavioral(p) => p.alpha(),
            EntropySpec::BehavioralConditioned { alpha, .. } => alpha,
        }
    }

    /// False only for Behavioral specs with a free `beta`.
    pub fn is_conditioned(&self) -> bool {
        !matches!(self, EntropySpec::Behavioral(_))
    }

    pub fn evaluator(&self) -> Result<Evaluator> {
        let kind = match *self {
            EntropySpec::Shannon { k } => {
                if !(k.is_finite() && k > 0.0) {
                    return Err(Error::param(format!("Shannon scale k must be > 0, got {k}")));
                }
                Kind::Shannon { k }
            }
            EntropySpec::Renyi { gamma } => {
                check_renyi(gamma)?;
                Kind::Renyi { gamma }
            }
            EntropySpec::Behavioral(p) => Kind::Behavioral {
                alpha: p.alpha(),
                ln_beta: p.ln_beta(),
            },
            EntropySpec::BehavioralConditioned { alpha, outcomes } => {
                let p = PrelecParams::conditioned(alpha, outcomes)?;
                Kind::Behavioral {
                    alpha: p.alpha(),
                    ln_beta: p.ln_beta(),
                }
            }
        };
        Ok(Evaluator { kind })
    }

    pub fn evaluate(&self, d: &Distribution) -> Result<f64> {
        Ok(self.evaluator()?.eval(d.probs()))
    }

    /// Parse `shannon`, `shannon:<k>`, `renyi:<gamma>`, `behavioral:<alpha>`
    /// (conditioned to `outcomes`) or `behavioral:<alpha>:<beta>`.
    pub fn parse(s: &str, outcomes: usize) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| Error::param(format!("bad number '{t}' in entropy spec '{s}'")))
        };
        let family: Family = parts[0].parse()?;
        match (family, parts.len()) {
            (Family::Shannon, 1) => Ok(EntropySpec::shannon()),
            (Family::Shannon, 2) => Family::Shannon.member(num(parts[1])?, outcomes),
            (Family::Renyi, 2) => EntropySpec::renyi(num(parts[1])?),
            (Family::Behavioral, 2) => EntropySpec::behavioral(num(parts[1])?, outcomes),
            (Family::Behavioral, 3) => Ok(EntropySpec::Behavioral(PrelecParams::new(
                num(parts[1])?,
                num(parts[2])?,
            )?)),
            _ => Err(Error::param(format!("malformed entropy spec '{s}'"))),
        }
    }
}

impl fmt::Display for EntropySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EntropySpec::Shannon { k } if k == 1.0 => write!(f, "shannon"),
            EntropySpec::Shannon { k } => write!(f, "shannon:{k}"),
            EntropySpec::Renyi { gamma } => write!(f, "renyi:{gamma}"),
            EntropySpec::Behavioral(p) => write!(f, "behavioral:{}:{}", p.alpha(), p.beta()),
            EntropySpec::BehavioralConditioned { alpha, .. } => write!(f, "behavioral:{alpha}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Shannon { k: f64 },
    Renyi { gamma: f64 },
    Behavioral { alpha: f64, ln_beta: f64 },
}

/// A validated spec, ready for repeated evaluation on raw probability slices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluator {
    kind: Kind,
}

impl Evaluator {
    /// Entropy of `probs`. The slice is assumed to be a valid distribution.
    #[inline]
    pub fn eval(&self, probs: &[f64]) -> f64 {
        match self.kind {
            Kind::Shannon { k } => k * shannon_raw(probs),
            Kind::Renyi { gamma } => renyi_raw(probs, gamma),
            Kind::Behavioral { alpha, ln_beta } => behavioral_raw(probs, alpha, ln_beta),
        }
    }

    /// Entropy of the Bernoulli distribution `(p, 1 - p)`.
    #[inline]
    pub fn bernoulli(&self, p: f64) -> f64 {
        self.eval(&[p, 1.0 - p])
    }
}
