mod common;

use bex_core::entropy::{
    behavioral_entropy, condition_beta, min_entropy, prelec_weight, renyi_entropy, shannon_entropy, Distribution,
    EntropySpec, PrelecParams,
};
use bex_core::simplex::{sample_simplex, sensitivity, simplex_volume};
use common::{behavioral_bernoulli, shannon_bernoulli};
use proptest::prelude::*;

fn distribution(m: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.0f64..1.0, m).prop_filter_map("all zero", |raw| {
        let s: f64 = raw.iter().sum();
        (s > 1e-9).then(|| Distribution::new(raw.iter().map(|x| x / s).collect()).ok()).flatten()
    })
}

fn any_distribution() -> impl Strategy<Value = Distribution> {
    (2usize..8).prop_flat_map(distribution)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conditioned_behavioral_is_bounded(d in any_distribution(), alpha in 0.05f64..20.0) {
        let m = d.len();
        let params = PrelecParams::conditioned(alpha, m).unwrap();
        let h = behavioral_entropy(&d, &params);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (m as f64).ln() + 1e-9, "{h} > ln {m}");
    }

    #[test]
    fn entropies_are_permutation_invariant(d in any_distribution(), alpha in 0.1f64..10.0, gamma in 0.1f64..50.0, k in 1usize..7) {
        let mut p = d.probs().to_vec();
        let n = p.len();
        p.rotate_left(k % n);
        p.reverse();
        let q = Distribution::new(p).unwrap();
        let params = PrelecParams::conditioned(alpha, d.len()).unwrap();
        prop_assume!((gamma - 1.0).abs() > 1e-6);
        prop_assert!((behavioral_entropy(&d, &params) - behavioral_entropy(&q, &params)).abs() < 1e-12);
        prop_assert!((renyi_entropy(&d, gamma).unwrap() - renyi_entropy(&q, gamma).unwrap()).abs() < 1e-12);
        prop_assert!((shannon_entropy(&d, 1.0).unwrap() - shannon_entropy(&q, 1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn renyi_is_non_increasing_in_order(d in any_distribution(), g1 in 0.05f64..30.0, g2 in 0.05f64..30.0) {
        prop_assume!((g1 - 1.0).abs() > 1e-6 && (g2 - 1.0).abs() > 1e-6 && (g1 - g2).abs() > 1e-9);
        let (lo, hi) = if g1 < g2 { (g1, g2) } else { (g2, g1) };
        let a = renyi_entropy(&d, lo).unwrap();
        let b = renyi_entropy(&d, hi).unwrap();
        prop_assert!(b <= a + 1e-12);
        prop_assert!(min_entropy(&d) <= b + 1e-12);
        prop_assert!(a <= (d.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn fixed_point_sits_at_one_over_m(alpha in 0.01f64..50.0, m in 2usize..20) {
        prop_assume!((alpha - 1.0).abs() > 1e-6);
        let params = PrelecParams::new(alpha, condition_beta(alpha, m).unwrap()).unwrap();
        let p = 1.0 / m as f64;
        prop_assert!((prelec_weight(p, &params).unwrap() - p).abs() < 1e-12);
    }

    #[test]
    fn weighting_is_monotone(alpha in 0.05f64..10.0, beta in 0.05f64..10.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let params = PrelecParams::new(alpha, beta).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (wl, wh) = (prelec_weight(lo, &params).unwrap(), prelec_weight(hi, &params).unwrap());
        prop_assert!(wl <= wh);
        prop_assert!((0.0..=1.0).contains(&wl) && (0.0..=1.0).contains(&wh));
    }

    #[test]
    fn bernoulli_matches_closed_form(p in 0.0f64..=1.0, alpha in 0.05f64..10.0) {
        let d = Distribution::bernoulli(p).unwrap();
        let got = EntropySpec::behavioral(alpha, 2).unwrap().evaluate(&d).unwrap();
        prop_assert!((got - behavioral_bernoulli(p, alpha)).abs() < 1e-12);
        prop_assert!((shannon_entropy(&d, 1.0).unwrap() - shannon_bernoulli(p)).abs() < 1e-12);
    }

    #[test]
    fn zero_outcomes_do_not_change_entropy(d in any_distribution(), alpha in 0.1f64..10.0, gamma in 0.1f64..10.0) {
        prop_assume!((gamma - 1.0).abs() > 1e-6);
        let mut p = d.probs().to_vec();
        p.push(0.0);
        let e = Distribution::new(p).unwrap();
        let params = PrelecParams::new(alpha, 0.7).unwrap();
        prop_assert_eq!(behavioral_entropy(&d, &params), behavioral_entropy(&e, &params));
        prop_assert!((renyi_entropy(&d, gamma).unwrap() - renyi_entropy(&e, gamma).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn simplex_samples_are_valid_and_reproducible() {
    let a = sample_simplex(4, 500, 11).unwrap();
    let b = sample_simplex(4, 500, 11).unwrap();
    assert_eq!(a, b);
    for d in &a {
        assert_eq!(d.len(), 4);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    assert_ne!(a, sample_simplex(4, 500, 12).unwrap());
}

#[test]
fn sensitivity_is_bounded_and_falls_with_alpha() {
    for m in [2, 3, 4] {
        let mut prev: Option<bex_core::simplex::SensitivityEstimate> = None;
        for alpha in [0.01, 0.1, 0.3, 1.5, 4.0, 20.0] {
            let s = sensitivity(&EntropySpec::behavioral(alpha, m).unwrap(), m, 100_000, 3).unwrap();
            assert!(s.value <= (m as f64).ln() * simplex_volume(m) + 3.0 * s.std_error);
            if let Some(p) = &prev {
                assert!(p.value >= s.value - 3.0 * p.std_error.hypot(s.std_error), "M={m} alpha={alpha}");
            }
            prev = Some(s);
        }
    }
}
