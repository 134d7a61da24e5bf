//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers (run with `--nocapture` to see them). Tolerances are
//! pinned in the asserts, not configurable.

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use scenery_core::caps::Caps;
use scenery_core::condition::{
    build_coefficient_matrix, condition_report, factorized_matrix, rank_deficiency_survey,
    ConditionVerdict, DEFAULT_RANK_TOL, WITNESS_RESIDUAL_TOL,
};
use scenery_core::explore::explore_open_question;
use scenery_core::fourier::{
    direct_pair, fourier_spectrum, fourier_transform, inverse_fourier, plancherel_pair, GFunction,
};
use scenery_core::group::{builtin_catalog, cyclic, dihedral, direct_product, quaternion8, FiniteGroup};
use scenery_core::repr::{irreducible_representations, verify_completeness, verify_representation};
use scenery_core::rng::SplitMix64;
use scenery_core::scenery::{
    enumerate_sceneries, multispectrum, reconstruct_from_multispectrum, shift_equivalent,
    spatial_autocorrelation, Scenery,
};
use scenery_core::walk::{
    observation_distribution, sample_trajectory, temporal_autocorrelation_direct,
    temporal_autocorrelation_spectral, temporal_multispectrum_direct,
    temporal_multispectrum_spectral, StepDistribution,
};

fn random_scenery(group: &Arc<FiniteGroup>, rng: &mut SplitMix64) -> Scenery {
    let bits = (0..group.order()).map(|_| rng.next_range(2) as u8).collect();
    Scenery::new(Arc::clone(group), bits).unwrap()
}

fn random_complex_fn(group: &Arc<FiniteGroup>, rng: &mut SplitMix64) -> GFunction {
    let pairs: Vec<[f64; 2]> = (0..group.order())
        .map(|_| [rng.next_f64() * 2.0 - 1.0, rng.next_f64() * 2.0 - 1.0])
        .collect();
    GFunction::from_pairs(Arc::clone(group), &pairs).unwrap()
}

#[test]
fn criterion_01_representation_validity() {
    let started = Instant::now();
    let mut worst_hom = 0.0f64;
    let mut worst_orth = 0.0f64;
    for group in builtin_catalog() {
        assert!(group.order() <= 12);
        let set = irreducible_representations(&group).unwrap();
        for rep in set.reps() {
            let report = verify_representation(&group, rep).unwrap();
            worst_hom = worst_hom.max(report.max_residual());
        }
        let completeness = verify_completeness(&set);
        assert_eq!(
            completeness.degree_square_sum,
            group.order(),
            "{}: degree squares must sum to |G| exactly",
            group.name()
        );
        worst_orth = worst_orth
            .max(completeness.max_orthogonality_residual)
            .max(completeness.max_irreducibility_residual);
    }
    assert!(worst_hom < 1e-10, "homomorphism residual {worst_hom}");
    assert!(worst_orth < 1e-10, "orthogonality residual {worst_orth}");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 01: PASS — representation validity (hom {worst_hom:.2e}, orth {worst_orth:.2e}, {elapsed:?})"
    );
}

#[test]
fn criterion_02_plancherel_and_inversion() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(20_001);
    let mut worst_pair = 0.0f64;
    let mut worst_round = 0.0f64;
    for group in builtin_catalog() {
        let set = irreducible_representations(&group).unwrap();
        for _ in 0..200 {
            let u = random_complex_fn(&group, &mut rng);
            let v = random_complex_fn(&group, &mut rng);
            let spectral = plancherel_pair(&u, &v, &set).unwrap();
            let direct = direct_pair(&u, &v).unwrap();
            worst_pair = worst_pair.max((spectral - direct).norm());

            let back = inverse_fourier(&set, &fourier_spectrum(&u, &set).unwrap()).unwrap();
            worst_round = worst_round.max(back.max_abs_diff(&u));
        }
    }
    assert!(worst_pair < 1e-10, "plancherel gap {worst_pair}");
    assert!(worst_round < 1e-10, "round-trip gap {worst_round}");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 02: PASS — plancherel {worst_pair:.2e}, inversion {worst_round:.2e} ({elapsed:?})"
    );
}

#[test]
fn criterion_03_autocorrelation_factorization() {
    let mut rng = SplitMix64::new(20_002);
    let mut worst = 0.0f64;
    for group in builtin_catalog() {
        let set = irreducible_representations(&group).unwrap();
        for _ in 0..100 {
            let f = random_scenery(&group, &mut rng);
            let f_fn = f.to_gfunction();
            let g_fn = f_fn.flip();
            let a_fn = spatial_autocorrelation(&f).to_gfunction().unwrap();
            for rep in set.reps() {
                let lhs = fourier_transform(&a_fn, rep).unwrap();
                let rhs = fourier_transform(&f_fn, rep)
                    .unwrap()
                    .matmul(&fourier_transform(&g_fn, rep).unwrap())
                    .unwrap();
                worst = worst.max(lhs.sub(&rhs).unwrap().max_abs());
            }
        }
    }
    assert!(worst < 1e-9, "factorization gap {worst}");
    println!("criterion 03: PASS — autocorrelation transform factorizes (gap {worst:.2e})");
}

#[test]
fn criterion_04_temporal_autocorrelation_routes() {
    let mut rng = SplitMix64::new(20_003);
    let mut worst = 0.0f64;
    for group in builtin_catalog() {
        let set = irreducible_representations(&group).unwrap();
        for _ in 0..50 {
            let f = random_scenery(&group, &mut rng);
            let gamma = StepDistribution::random(Arc::clone(&group), &mut rng);
            for lag in 1..=12 {
                let direct = temporal_autocorrelation_direct(&f, &gamma, lag).unwrap();
                let spectral = temporal_autocorrelation_spectral(&f, &gamma, lag, &set).unwrap();
                worst = worst.max((direct - spectral).abs());
            }
        }
    }
    assert!(worst < 1e-10, "route gap {worst}");
    println!("criterion 04: PASS — autocorrelation routes agree (gap {worst:.2e})");
}

#[test]
fn criterion_05_temporal_multispectrum_routes() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(20_004);
    let caps = Caps::default();
    let mut worst = 0.0f64;
    for group in builtin_catalog().into_iter().filter(|g| g.order() <= 8) {
        let set = irreducible_representations(&group).unwrap();
        for _ in 0..5 {
            let f = random_scenery(&group, &mut rng);
            let gamma = StepDistribution::random(Arc::clone(&group), &mut rng);
            for l1 in 1..=4u32 {
                for l2 in 1..=4u32 {
                    let direct =
                        temporal_multispectrum_direct(&f, &gamma, &[l1, l2], &caps).unwrap();
                    let spectral =
                        temporal_multispectrum_spectral(&f, &gamma, &[l1, l2], &set, &caps)
                            .unwrap();
                    worst = worst.max((direct - spectral).abs());
                }
            }
        }
    }
    for group in builtin_catalog().into_iter().filter(|g| g.order() <= 4) {
        let set = irreducible_representations(&group).unwrap();
        for _ in 0..3 {
            let f = random_scenery(&group, &mut rng);
            let gamma = StepDistribution::random(Arc::clone(&group), &mut rng);
            for l1 in 1..=4u32 {
                for l2 in 1..=4u32 {
                    for l3 in 1..=4u32 {
                        let lags = [l1, l2, l3];
                        let direct =
                            temporal_multispectrum_direct(&f, &gamma, &lags, &caps).unwrap();
                        let spectral =
                            temporal_multispectrum_spectral(&f, &gamma, &lags, &set, &caps)
                                .unwrap();
                        worst = worst.max((direct - spectral).abs());
                    }
                }
            }
        }
    }
    assert!(worst < 1e-9, "route gap {worst}");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!("criterion 05: PASS — multispectrum routes agree (gap {worst:.2e}, {elapsed:?})");
}

#[test]
fn criterion_06_reconstruction_exhaustive() {
    let started = Instant::now();
    let caps = Caps::default();
    let z2 = cyclic(2).unwrap();
    let groups: Vec<Arc<FiniteGroup>> = vec![
        cyclic(3).unwrap(),
        cyclic(4).unwrap(),
        cyclic(5).unwrap(),
        direct_product(&z2, &z2).unwrap(),
        dihedral(3).unwrap(),
    ];
    for group in &groups {
        let n = group.order();
        let all: Vec<Scenery> = enumerate_sceneries(group).unwrap().collect();
        let tensors: Vec<_> = all
            .iter()
            .map(|f| multispectrum(f, n, &caps).unwrap())
            .collect();
        for (f, tensor) in all.iter().zip(&tensors) {
            let rebuilt = reconstruct_from_multispectrum(tensor, &caps).unwrap();
            assert!(
                shift_equivalent(&rebuilt, f).unwrap().is_some(),
                "{}: {} not recovered",
                group.name(),
                f.to_bitstring()
            );
        }
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                let same = tensors[i] == tensors[j];
                let shifted = shift_equivalent(&all[i], &all[j]).unwrap().is_some();
                assert_eq!(
                    same,
                    shifted,
                    "{}: separation fails for {} vs {}",
                    group.name(),
                    all[i].to_bitstring(),
                    all[j].to_bitstring()
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "criterion 06: PASS — exhaustive reconstruction and separation on {} groups ({elapsed:?})",
        groups.len()
    );
}

#[test]
fn criterion_07_nonabelian_rank_deficiency() {
    let started = Instant::now();
    let caps = Caps::default();
    let cases: Vec<(Arc<FiniteGroup>, u64)> = vec![
        (dihedral(3).unwrap(), 5),
        (dihedral(4).unwrap(), 7),
        (quaternion8(), 7),
    ];
    for (group, bound) in &cases {
        let set = irreducible_representations(group).unwrap();
        let survey = rank_deficiency_survey(&set, 25, 1234, DEFAULT_RANK_TOL, &caps).unwrap();
        assert_eq!(survey.theoretical_rank_bound, *bound, "{}", group.name());
        assert!(survey.all_condition_fails, "{}", group.name());
        assert!(survey.all_within_bound);
        assert!(survey.max_rank as u64 <= *bound);
        for trial in &survey.trials {
            assert!(trial.nullity >= 1);
            let residual = trial.witness_residual.expect("every trial is deficient");
            assert!(
                residual < WITNESS_RESIDUAL_TOL,
                "{} {}: residual {residual}",
                group.name(),
                trial.gamma_label
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("criterion 07: PASS — rank deficiency on D3/D4/Q8 with audited witnesses ({elapsed:?})");
}

#[test]
fn criterion_08_abelian_positive_control() {
    let caps = Caps::default();
    let z2 = cyclic(2).unwrap();
    let set2 = irreducible_representations(&z2).unwrap();
    let skewed = StepDistribution::new(Arc::clone(&z2), vec![0.25, 0.75]).unwrap();
    for order in 1..=2usize {
        let report = condition_report(&set2, &skewed, order, None, DEFAULT_RANK_TOL, &caps).unwrap();
        assert_eq!(report.verdict, ConditionVerdict::ConditionHolds);
        assert_eq!(report.rank, 2usize.pow(order as u32), "full rank at order {order}");
    }
    let z3 = cyclic(3).unwrap();
    let set3 = irreducible_representations(&z3).unwrap();
    let gamma3 = StepDistribution::new(Arc::clone(&z3), vec![0.5, 0.3, 0.2]).unwrap();
    for order in 1..=2usize {
        let report = condition_report(&set3, &gamma3, order, None, DEFAULT_RANK_TOL, &caps).unwrap();
        assert_eq!(report.verdict, ConditionVerdict::ConditionHolds);
        assert_eq!(report.rank, 3usize.pow(order as u32));
    }
    let uniform = StepDistribution::uniform(Arc::clone(&z2));
    let report = condition_report(&set2, &uniform, 1, None, DEFAULT_RANK_TOL, &caps).unwrap();
    assert_eq!(report.verdict, ConditionVerdict::ConditionFails);
    println!("criterion 08: PASS — abelian controls (Z2 skewed holds, Z3 skewed holds, Z2 uniform fails)");
}

#[test]
fn criterion_09_coefficient_matrix_oracle() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(20_005);
    let caps = Caps::default();
    let mut worst = 0.0f64;
    for group in builtin_catalog() {
        let set = irreducible_representations(&group).unwrap();
        for _ in 0..10 {
            let gamma = StepDistribution::random(Arc::clone(&group), &mut rng);
            for order in 1..=2usize {
                let lag_bound = group.order().min(4);
                let trace_built =
                    build_coefficient_matrix(&set, &gamma, order, lag_bound, &caps).unwrap();
                let factorized = factorized_matrix(&gamma, order, lag_bound, &caps).unwrap();
                worst = worst.max(trace_built.matrix.sub(&factorized).unwrap().max_abs());
            }
        }
    }
    assert!(worst < 1e-10, "construction gap {worst}");
    let elapsed = started.elapsed();
    println!("criterion 09: PASS — trace and convolution constructions agree (gap {worst:.2e}, {elapsed:?})");
}

#[test]
fn criterion_10_oracle_consistency() {
    let caps = Caps::default();
    // Temporal moments equal all-ones pattern marginals.
    let mut worst = 0.0f64;
    for group in [cyclic(4).unwrap(), dihedral(3).unwrap()] {
        let mut rng = SplitMix64::new(20_006 + group.order() as u64);
        for _ in 0..5 {
            let f = random_scenery(&group, &mut rng);
            let gamma = StepDistribution::random(Arc::clone(&group), &mut rng);
            let obs = observation_distribution(&f, &gamma, 8, &caps).unwrap();
            for lag in 1..=3u32 {
                let b = temporal_autocorrelation_direct(&f, &gamma, lag).unwrap();
                let m = obs.marginal_all_ones(&[1, 1 + lag]);
                worst = worst.max((b - m).abs());
            }
            for l1 in 1..=3u32 {
                for l2 in 1..=3u32 {
                    let b = temporal_multispectrum_direct(&f, &gamma, &[l1, l2], &caps).unwrap();
                    let m = obs.marginal_all_ones(&[1, 1 + l1, 1 + l1 + l2]);
                    worst = worst.max((b - m).abs());
                }
            }
        }
    }
    assert!(worst < 1e-10, "moment/marginal gap {worst}");

    // Monte Carlo trajectories against the exact T = 3 distribution.
    let z3 = cyclic(3).unwrap();
    let f = Scenery::from_bitstring(Arc::clone(&z3), "110").unwrap();
    let gamma = StepDistribution::new(Arc::clone(&z3), vec![0.5, 0.3, 0.2]).unwrap();
    let exact = observation_distribution(&f, &gamma, 3, &caps).unwrap();
    let samples = 100_000usize;
    let mut counts = [0usize; 8];
    for i in 0..samples {
        let bits = sample_trajectory(&f, &gamma, 3, 555_000 + i as u64).unwrap();
        let idx = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (t, &b)| acc | ((b as usize) << t));
        counts[idx] += 1;
    }
    for (pattern, &count) in counts.iter().enumerate() {
        let p = exact.probs()[pattern];
        let observed = count as f64 / samples as f64;
        let stderr = (p * (1.0 - p) / samples as f64).sqrt();
        assert!(
            (observed - p).abs() <= 3.0 * stderr + 1e-12,
            "pattern {pattern}: observed {observed}, exact {p}, 3se {}",
            3.0 * stderr
        );
    }
    println!("criterion 10: PASS — moments match marginals (gap {worst:.2e}); Monte Carlo within 3 standard errors");
}

#[test]
fn criterion_11_explorer_smoke() {
    let started = Instant::now();
    // CLI run on Z4 with the uniform walk: the 1100/1010 classes must be
    // flagged as non-shift-equivalent yet indistinguishable.
    let output = Command::new(env!("CARGO_BIN_EXE_scenery"))
        .args(["explore", "--group", "Z4", "--gamma", "uniform"])
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let result = &report["result"];
    assert_eq!(result["consistency_ok"].as_bool(), Some(true));
    let candidates = result["candidates"].as_array().unwrap();
    let z4 = cyclic(4).unwrap();
    let f1100 = Scenery::from_bitstring(Arc::clone(&z4), "1100").unwrap();
    let f1010 = Scenery::from_bitstring(Arc::clone(&z4), "1010").unwrap();
    let hit = candidates
        .iter()
        .find(|c| {
            let a = Scenery::from_bitstring(Arc::clone(&z4), c["scenery_a"].as_str().unwrap()).unwrap();
            let b = Scenery::from_bitstring(Arc::clone(&z4), c["scenery_b"].as_str().unwrap()).unwrap();
            (shift_equivalent(&a, &f1100).unwrap().is_some()
                && shift_equivalent(&b, &f1010).unwrap().is_some())
                || (shift_equivalent(&a, &f1010).unwrap().is_some()
                    && shift_equivalent(&b, &f1100).unwrap().is_some())
        })
        .expect("the 1100/1010 class pair must be flagged");
    assert_eq!(hit["shift_equivalent"].as_bool(), Some(false));
    assert_eq!(hit["flagged_indistinguishable"].as_bool(), Some(true));

    // Full library run on dihedral(3) with one random step law.
    let d3 = dihedral(3).unwrap();
    let set = irreducible_representations(&d3).unwrap();
    let mut rng = SplitMix64::new(20_007);
    let gamma = StepDistribution::random(Arc::clone(&d3), &mut rng);
    let full = explore_open_question(&set, &gamma, "random:20007", 3, 8, &Caps::default()).unwrap();
    assert!(full.consistency_ok, "{:?}", full.consistency_violations);
    assert_eq!(full.class_count, 16);
    assert_eq!(full.pairs_checked, 120);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "criterion 11: PASS — explorer flags the Z4 uniform pair; D3 full run clean ({} candidates, {elapsed:?})",
        full.candidates.len()
    );
}
