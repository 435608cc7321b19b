//! Prelec probability weighting `w(p) = exp(-beta * (-ln p)^alpha)`.
//!
//! The weight is evaluated in log space, `w = exp(-exp(ln beta + alpha * ln(-ln p)))`,
//! so that very large `alpha` (where `beta` itself would overflow) stays finite.

use crate::error::{Error, Result};

/// Probabilities below this are treated as exactly zero before `(-ln p)^alpha`.
pub const PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrelecParams {
    alpha: f64,
    ln_beta: f64,
}

impl PrelecParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidPrelec { alpha, beta });
        }
        Ok(Self {
            alpha,
            ln_beta: beta.ln(),
        })
    }

    /// Parameters whose interior fixed point sits at `1 / outcomes`.
    pub fn conditioned(alpha: f64, outcomes: usize) -> Result<Self> {
        if outcomes < 2 {
            return Err(Error::OutcomeCount(outcomes));
        }
        Self::conditioned_real(alpha, outcomes as f64)
    }

    /// Same as [`PrelecParams::conditioned`] but for a real-valued outcome count `m > 1`.
    pub fn conditioned_real(alpha: f64, m: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidPrelec {
                alpha,
                beta: f64::NAN,
            });
        }
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::param(format!("conditioning count must be > 1, got {m}")));
        }
        Ok(Self {
            alpha,
            ln_beta: (1.0 - alpha) * m.ln().ln(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.ln_beta.exp()
    }

    pub fn ln_beta(&self) -> f64 {
        self.ln_beta
    }

    /// Weight of `p`, which the caller guarantees lies in `[0, 1]`.
    #[inline]
    pub fn weight(&self, p: f64) -> f64 {
        weight_raw(p, self.alpha, self.ln_beta)
    }
}

#[inline]
pub(crate) fn weight_raw(p: f64, alpha: f64, ln_beta: f64) -> f64 {
    if p < PROB_FLOOR {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let x = -p.ln();
    (-(ln_beta + alpha * x.ln()).exp()).exp()
}

/// `w(p)` with domain checking.
pub fn prelec_weight(p: f64, params: &PrelecParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityDomain(p));
    }
    Ok(params.weight(p))
}

/// `beta = exp((1 - alpha) ln ln M)`, which puts the fixed point of `w` at `1/M`.
pub fn condition_beta(alpha: f64, outcomes: usize) -> Result<f64> {
    Ok(PrelecParams::conditioned(alpha, outcomes)?.beta())
}

/// [`condition_beta`] for a real-valued outcome count.
pub fn condition_beta_real(alpha: f64, m: f64) -> Result<f64> {
    Ok(PrelecParams::conditioned_real(alpha, m)?.beta())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedPoint {
    /// The unique fixed point in `(0, 1)`.
    Interior(f64),
    /// `alpha = beta = 1`: `w` is the identity.
    AllFixed,
}

/// Interior fixed point `p* = exp(-(1/beta)^(1/(alpha-1)))`.
pub fn prelec_fixed_point(params: &PrelecParams) -> Result<FixedPoint> {
    let alpha = params.alpha;
    if alpha == 1.0 {
        if params.ln_beta.abs() < 1e-15 {
            return Ok(FixedPoint::AllFixed);
        }
        return Err(Error::UndefinedFixedPoint(params.beta()));
    }
    let inner = (-params.ln_beta / (alpha - 1.0)).exp();
    Ok(FixedPoint::Interior((-inner).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_when_alpha_beta_one() {
        let p = PrelecParams::new(1.0, 1.0).unwrap();
        assert!((prelec_weight(0.5, &p).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(prelec_fixed_point(&p).unwrap(), FixedPoint::AllFixed);
    }

    #[test]
    fn endpoints_are_exact() {
        let p = PrelecParams::new(0.3, 2.0).unwrap();
        assert_eq!(prelec_weight(0.0, &p).unwrap(), 0.0);
        assert_eq!(prelec_weight(1.0, &p).unwrap(), 1.0);
        assert_eq!(prelec_weight(1e-301, &p).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_matches_high_precision() {
        // 40-digit evaluation of exp(-0.8 * (-ln 0.3)^0.5)
        let p = PrelecParams::new(0.5, 0.8).unwrap();
        let w = prelec_weight(0.3, &p).unwrap();
        assert!((w - 0.415_694_128_847_655_1).abs() < 1e-15);
        let lo = prelec_weight(0.29, &p).unwrap();
        let hi = prelec_weight(0.31, &p).unwrap();
        assert!((lo - 0.410_623_551_753_819_3).abs() < 1e-15);
        assert!((hi - 0.420_727_609_799_502_2).abs() < 1e-15);
        assert!(lo < w && w < hi);
    }

    #[test]
    fn domain_errors() {
        let p = PrelecParams::new(1.0, 1.0).unwrap();
        assert!(matches!(prelec_weight(1.5, &p), Err(Error::ProbabilityDomain(_))));
        assert!(matches!(prelec_weight(-0.1, &p), Err(Error::ProbabilityDomain(_))));
        assert!(matches!(prelec_weight(f64::NAN, &p), Err(Error::ProbabilityDomain(_))));
        assert!(PrelecParams::new(0.0, 1.0).is_err());
        assert!(PrelecParams::new(1.0, -1.0).is_err());
        assert!(matches!(condition_beta(0.5, 1), Err(Error::OutcomeCount(1))));
    }

    #[test]
    fn conditioning_values() {
        assert!((condition_beta(1.0, 5).unwrap() - 1.0).abs() < 1e-15);
        assert!((condition_beta(0.5, 2).unwrap() - 0.832_554_611_157_697_8).abs() < 1e-15);
        let b3 = condition_beta(3.0, 2).unwrap();
        assert!((b3 - 2.081_368_981_005_607_8).abs() < 1e-14);
        let e_e = std::f64::consts::E.exp();
        let b = condition_beta_real(0.5, e_e).unwrap();
        assert!((b - 1.648_721_270_700_128_1).abs() < 1e-14);
    }

    #[test]
    fn fixed_points() {
        let p = PrelecParams::new(2.0, 1.0 / std::f64::consts::LN_2).unwrap();
        match prelec_fixed_point(&p).unwrap() {
            FixedPoint::Interior(x) => {
                assert!((x - 0.5).abs() < 1e-14);
                assert!((p.weight(x) - x).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }

        let p = PrelecParams::conditioned(0.5, 10).unwrap();
        let FixedPoint::Interior(x) = prelec_fixed_point(&p).unwrap() else {
            panic!("expected interior fixed point");
        };
        assert!((x - 0.1).abs() < 1e-14);
        // bisection on w(p) - p over the interior as an independent root finder
        let f = |q: f64| p.weight(q) - q;
        let (mut lo, mut hi) = (1e-6, 0.9);
        assert!(f(lo).signum() != f(hi).signum());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((0.5 * (lo + hi) - 0.1).abs() < 1e-12);

        let p = PrelecParams::conditioned(3.0, 2).unwrap();
        let FixedPoint::Interior(x) = prelec_fixed_point(&p).unwrap() else {
            panic!();
        };
        assert!((x - 0.5).abs() < 1e-14);

        let p = PrelecParams::new(1.0, 2.0).unwrap();
        assert!(matches!(prelec_fixed_point(&p), Err(Error::UndefinedFixedPoint(_))));
    }

    #[test]
    fn large_alpha_stays_finite() {
        let p = PrelecParams::conditioned(1500.0, 2).unwrap();
        for q in [1e-200, 0.1, 0.49, 0.5, 0.51, 0.9, 1.0 - 1e-12] {
            let w = p.weight(q);
            assert!((0.0..=1.0).contains(&w), "w({q}) = {w}");
        }
        assert!((p.weight(0.5) - 0.5).abs() < 1e-9);
    }
}
