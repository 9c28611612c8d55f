mod common;

use common::*;
use rand::Rng;
use swipt_core::allocation::SolveOptions;
use swipt_core::power_alloc::{capped_alloc, single_best_alloc, spa_pipeline, waterfill, SpaConfig, SpaMode};
use swipt_core::Error;

fn spa_config(mode: SpaMode, p_e: f64, cap: Option<f64>) -> SpaConfig {
    let threshold = match mode {
        SpaMode::CapacityWaterfill => Q_MIN_W,
        SpaMode::HarvestConcentrate => C_MIN_BPS,
    };
    SpaConfig { mode, threshold, equal_power_w: p_e, cap_w: cap, iterations: 1, solve: SolveOptions::default() }
}

#[test]
fn constraint_and_partition_survive_power_allocation() {
    let mut rng = rng(11);
    for mode in [SpaMode::CapacityWaterfill, SpaMode::HarvestConcentrate] {
        for cap in [None, Some(4.8e-3)] {
            for _ in 0..100 {
                let noise_db = grid_point(&mut rng);
                let (ch, _) = reference_draw(&mut rng, noise_db, 4e-3);
                let out = spa_pipeline(&ch, &spa_config(mode, 4e-3, cap)).unwrap();
                if !out.equal_power.feasible {
                    continue;
                }
                assert_eq!(out.outcome.mask, out.equal_power.mask);
                assert_eq!(out.outcome.constraint_used, out.equal_power.constraint_used);
                assert!(out.outcome.feasible);
                assert!(out.outcome.upper_bound.is_none());
            }
        }
    }
}

#[test]
fn spa_never_loses_to_equal_power() {
    let mut rng = rng(12);
    let mut improved = 0;
    for trial in 0..1000 {
        let mode = if trial % 2 == 0 { SpaMode::CapacityWaterfill } else { SpaMode::HarvestConcentrate };
        let noise_db = grid_point(&mut rng);
        let (ch, _) = reference_draw(&mut rng, noise_db, 4e-3);
        let out = spa_pipeline(&ch, &spa_config(mode, 4e-3, Some(4.8e-3))).unwrap();
        if !out.equal_power.feasible {
            continue;
        }
        let (spa, sa) = (out.outcome.objective, out.equal_power.objective);
        assert!(spa >= sa * (1.0 - 1e-12), "draw {trial}: {spa} < {sa}");
        if spa > sa * (1.0 + 1e-9) {
            improved += 1;
        }
    }
    assert!(improved > 500, "only {improved} draws improved");
}

#[test]
fn spa_conserves_power_per_set() {
    let mut rng = rng(13);
    for mode in [SpaMode::CapacityWaterfill, SpaMode::HarvestConcentrate] {
        for _ in 0..200 {
            let noise_db = grid_point(&mut rng);
            let (ch, _) = reference_draw(&mut rng, noise_db, 2e-3);
            let out = spa_pipeline(&ch, &spa_config(mode, 2e-3, None)).unwrap();
            let p = out.powers.as_slice();
            let mask = &out.outcome.mask;
            let info: f64 = mask.info_indices().iter().map(|&i| p[i]).sum();
            let harvest: f64 = mask.harvest_indices().iter().map(|&i| p[i]).sum();
            let scale = 2e-3 * K as f64;
            assert!((info - 2e-3 * mask.info_count() as f64).abs() <= 1e-12 * scale);
            assert!((harvest - 2e-3 * mask.harvest_count() as f64).abs() <= 1e-12 * scale);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }
}

#[test]
fn more_iterations_never_lose_feasibility() {
    let mut rng = rng(14);
    for _ in 0..50 {
        let (ch, _) = reference_draw(&mut rng, 40.0, 4e-3);
        let mut cfg = spa_config(SpaMode::CapacityWaterfill, 4e-3, None);
        cfg.iterations = 3;
        let out = spa_pipeline(&ch, &cfg).unwrap();
        if out.outcome.feasible {
            assert!(out.outcome.constraint_used >= Q_MIN_W);
        }
    }
}

#[test]
fn waterfill_matches_bisection_and_kkt() {
    let mut rng = rng(15);
    for _ in 0..2000 {
        let n = rng.random_range(1..=32);
        let gains: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..4.0f64).powi(3)).collect();
        let budget = rng.random_range(1e-3..10.0);
        let wf = match waterfill(&gains, budget) {
            Ok(wf) => wf,
            Err(Error::DegenerateChannel) => {
                assert!(gains.iter().all(|&g| g == 0.0));
                continue;
            }
            Err(e) => panic!("{e}"),
        };
        let mu = bisected_water_level(&gains, budget);
        assert!((wf.water_level - mu).abs() <= 1e-9 * mu, "{} vs {mu}", wf.water_level);
        assert!(kkt_residual(&gains, &wf.powers, wf.water_level) < 1e-9);
        let total: f64 = wf.powers.iter().sum();
        assert!((total - budget).abs() <= 1e-12 * budget);
        let equal = vec![budget / n as f64; n];
        assert!(capacity(&gains, &wf.powers) >= capacity(&gains, &equal) * (1.0 - 1e-12));
    }
}

#[test]
fn harvest_allocations_match_vertex_enumeration() {
    let mut rng = rng(16);
    for _ in 0..300 {
        let n = rng.random_range(1..=8);
        let gains: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let cap = rng.random_range(0.1..1.0);
        let budget = rng.random_range(0.0..=cap * n as f64);
        let p = capped_alloc(&gains, budget, cap).unwrap();
        let got: f64 = gains.iter().zip(p.as_slice()).map(|(g, p)| g * p).sum();
        let want = capped_lp_optimum(&gains, budget, cap);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300), "{got} vs {want}");

        let single = single_best_alloc(&gains, budget).unwrap();
        let got: f64 = gains.iter().zip(single.as_slice()).map(|(g, p)| g * p).sum();
        let want = capped_lp_optimum(&gains, budget, budget.max(f64::MIN_POSITIVE));
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300));
    }
}
