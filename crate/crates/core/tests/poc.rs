use bex_core::poc::{
    apply_mapping, generate_environment, run_sweep, run_trial, spearman, sweep_configs, EnvConfig, MappingNoise,
    NoiseRanges, PocEnvironment, SummaryRow, TrialConfig, TrialOptions, TrialSeeds, THRESHOLDS,
};
use bex_core::{EntropySpec, OccupancyGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn env(width: usize, height: usize, resolution: f64, seed: u64) -> PocEnvironment {
    let cfg = EnvConfig {
        width,
        height,
        resolution,
        ..EnvConfig::default()
    };
    generate_environment(seed, &cfg).unwrap()
}

fn levels() -> Vec<MappingNoise> {
    (0..3).map(|l| MappingNoise::level(l, &NoiseRanges::default()).unwrap()).collect()
}

fn seeds() -> TrialSeeds {
    TrialSeeds { mapping: 2, frontier: 3 }
}

#[test]
fn one_spec_full_grid_gives_sixty_logs() {
    let e = env(40, 60, 0.5, 8);
    let specs = [EntropySpec::behavioral(3.0, 2).unwrap()];
    let configs = sweep_configs(&[2.0, 3.0, 4.0, 5.0], &levels(), &[1, 2, 3, 4, 5], &specs, seeds());
    assert_eq!(configs.len(), 60);
    let out = run_sweep(&e, &configs, &TrialOptions::default(), 1).unwrap();
    assert_eq!(out.len(), 60);
    for (o, c) in out.iter().zip(&configs) {
        let t = o.as_ref().unwrap();
        assert_eq!(&t.config, c);
        let counts: Vec<Option<usize>> = THRESHOLDS.iter().map(|&th| t.iterations_to(th)).collect();
        for w in counts.windows(2) {
            match (w[0], w[1]) {
                (Some(a), Some(b)) => assert!(a <= b),
                (None, Some(_)) => panic!("a higher threshold reached before a lower one"),
                _ => {}
            }
        }
    }
}

#[test]
fn known_free_environment_stops_immediately() {
    let mut e = env(20, 20, 0.5, 1);
    let free = OccupancyGrid::filled(20, 20, 0.5, 0.0).unwrap();
    e.ground_truth = free.clone();
    e.initial = free;
    let cfg = TrialConfig {
        radius: 2.0,
        noise: MappingNoise::exact(),
        start: 1,
        spec: EntropySpec::shannon(),
        seeds: seeds(),
    };
    let out = run_sweep(&e, &[cfg], &TrialOptions::default(), 1).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].as_ref().unwrap().log.iterations(), 0);
}

#[test]
fn parallel_sweep_matches_serial() {
    let e = env(30, 40, 0.5, 4);
    let specs = [EntropySpec::shannon(), EntropySpec::renyi(2.0).unwrap()];
    let configs = sweep_configs(&[2.0, 4.0], &levels(), &[1, 3], &specs, seeds());
    let a = run_sweep(&e, &configs, &TrialOptions::default(), 1).unwrap();
    let b = run_sweep(&e, &configs, &TrialOptions::default(), 3).unwrap();
    let bytes = |o: &[bex_core::poc::TrialOutcome]| -> Vec<Vec<u8>> {
        o.iter()
            .map(|t| {
                let mut buf = Vec::new();
                t.as_ref().unwrap().write_csv(&mut buf).unwrap();
                buf
            })
            .collect()
    };
    assert_eq!(bytes(&a), bytes(&b));
}

#[test]
fn mapping_stream_is_shared_across_specs() {
    let base = TrialConfig {
        radius: 3.0,
        noise: levels()[1],
        start: 2,
        spec: EntropySpec::shannon(),
        seeds: seeds(),
    };
    let mut draws = Vec::new();
    for spec in ["shannon", "renyi:0.5", "renyi:1000", "behavioral:0.2", "behavioral:5"] {
        let cfg = TrialConfig {
            spec: EntropySpec::parse(spec, 2).unwrap(),
            ..base
        };
        let mut rng = cfg.mapping_rng();
        draws.push((0..32).map(|_| rng.random::<u64>()).collect::<Vec<_>>());
    }
    assert!(draws.windows(2).all(|w| w[0] == w[1]));
    let other = TrialConfig { start: 3, ..base };
    let mut rng = other.mapping_rng();
    let d: Vec<u64> = (0..32).map(|_| rng.random()).collect();
    assert_ne!(d, draws[0]);
}

// Repeatedly observe 10^4 cells until every one reaches its true value.
fn applications_to_converge(noise: &MappingNoise, seed: u64) -> f64 {
    let n = 10_000;
    let mut init = ChaCha8Rng::seed_from_u64(99);
    let truth_cells: Vec<f64> = (0..n).map(|_| if init.random::<bool>() { 1.0 } else { 0.0 }).collect();
    let start = vec![0.5; n];
    let truth = OccupancyGrid::new(100, 100, 0.1, (0.0, 0.0), truth_cells).unwrap();
    let mut grid = OccupancyGrid::new(100, 100, 0.1, (0.0, 0.0), start).unwrap();
    let all: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = vec![0usize; n];
    let mut changed = Vec::new();
    let mut round = 0;
    while grid.cells() != truth.cells() {
        round += 1;
        changed.clear();
        apply_mapping(&mut grid, &all, &truth, noise, &mut rng, &mut changed);
        for &i in &changed {
            if grid.get(i) == truth.get(i) {
                steps[i] = round;
            }
        }
        assert!(round < 10_000);
    }
    steps.iter().sum::<usize>() as f64 / n as f64
}

#[test]
fn wider_step_range_converges_faster() {
    let l = levels();
    let one = applications_to_converge(&l[1], 5);
    let two = applications_to_converge(&l[2], 5);
    // Renewal count for U[0, s] steps to cover distance d is about 2d/s + 2/3.
    let expect = |s: f64| 2.0 * 0.5 / s + 2.0 / 3.0;
    assert!(one < two, "{one} vs {two}");
    assert!((one - expect(0.35)).abs() < 0.1, "{one}");
    assert!((two - expect(0.15)).abs() < 0.15, "{two}");
    assert_eq!(applications_to_converge(&l[0], 5), 1.0);
}

#[test]
fn entropy_and_area_completion_rank_together() {
    let e = env(60, 90, 0.5, 2);
    let specs: Vec<EntropySpec> = ["shannon", "renyi:0.5", "renyi:2", "behavioral:0.5", "behavioral:3"]
        .iter()
        .map(|s| EntropySpec::parse(s, 2).unwrap())
        .collect();
    let configs = sweep_configs(&[2.0, 3.0, 4.0, 5.0], &levels(), &[1, 2, 3, 4, 5], &specs, seeds());
    let out = run_sweep(&e, &configs, &TrialOptions::default(), 1).unwrap();
    let rows: Vec<SummaryRow> = out.iter().map(SummaryRow::from_outcome).collect();
    let (ent, area): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| Some((r.iterations_to(99)? as f64, r.area_iterations_to(99)? as f64)))
        .unzip();
    assert!(ent.len() >= 100, "only {} trials reached 99% on both metrics", ent.len());
    let rho = spearman(&ent, &area).unwrap();
    assert!(rho > 0.8, "rank correlation {rho}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mapping_moves_toward_truth(
        values in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..200),
        level in 0u8..3,
        seed in any::<u64>(),
    ) {
        let n = values.len();
        let cur = OccupancyGrid::new(n, 1, 0.1, (0.0, 0.0), values.iter().map(|v| v.0).collect()).unwrap();
        let truth = OccupancyGrid::new(n, 1, 0.1, (0.0, 0.0), values.iter().map(|v| if v.1 { 1.0 } else { 0.0 }).collect()).unwrap();
        let noise = MappingNoise::level(level, &NoiseRanges::default()).unwrap();
        let mut next = cur.clone();
        let all: Vec<usize> = (0..n).collect();
        let mut changed = Vec::new();
        apply_mapping(&mut next, &all, &truth, &noise, &mut ChaCha8Rng::seed_from_u64(seed), &mut changed);
        for i in 0..n {
            let (before, after, t) = (cur.get(i), next.get(i), truth.get(i));
            prop_assert!((after - t).abs() <= (before - t).abs());
            prop_assert!((after - before).abs() <= noise.range + 1e-15 || level == 0);
            if level == 0 {
                prop_assert_eq!(after, t);
            }
        }
    }

    #[test]
    fn trial_logs_are_reproducible(seed in 0u64..50, start in 1usize..=5, level in 0u8..3) {
        let e = env(24, 30, 0.5, seed);
        let cfg = TrialConfig {
            radius: 2.0,
            noise: MappingNoise::level(level, &NoiseRanges::default()).unwrap(),
            start,
            spec: EntropySpec::behavioral(2.0, 2).unwrap(),
            seeds: TrialSeeds { mapping: seed, frontier: seed + 1 },
        };
        let a = run_trial(&e, &cfg, &TrialOptions::default()).unwrap();
        let b = run_trial(&env(24, 30, 0.5, seed), &cfg, &TrialOptions::default()).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.write_csv(&mut x).unwrap();
        b.write_csv(&mut y).unwrap();
        prop_assert_eq!(x, y);
    }
}
