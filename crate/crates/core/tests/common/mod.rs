//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swipt_core::rf_model::{compute_metrics, sample_rayleigh, ChannelRealization, PowerVector, SubcarrierMetrics};

pub const BANDWIDTH_HZ: f64 = 15e3;
pub const ETA: f64 = 0.5;
pub const K: usize = 32;
pub const Q_MIN_W: f64 = 12e-3;
pub const C_MIN_BPS: f64 = 400e3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One Rayleigh draw at the reference settings with equal power `p_e`.
pub fn reference_draw(rng: &mut ChaCha8Rng, noise_db: f64, p_e: f64) -> (ChannelRealization, SubcarrierMetrics) {
    let gains = sample_rayleigh(K, rng, 1.0).unwrap();
    let ch = ChannelRealization::uniform(BANDWIDTH_HZ, 10f64.powf(-noise_db / 10.0), gains, ETA).unwrap();
    let m = compute_metrics(&ch, &PowerVector::equal(K, p_e).unwrap()).unwrap();
    (ch, m)
}

/// Random noise point from the reference grid.
pub fn grid_point(rng: &mut ChaCha8Rng) -> f64 {
    30.0 + 5.0 * rng.random_range(0..=8) as f64
}

/// `max sum g_i p_i` over `sum p_i = budget, 0 <= p_i <= cap` by enumerating
/// LP vertices: every coordinate at 0 or `cap` except at most one.
pub fn capped_lp_optimum(gains: &[f64], budget: f64, cap: f64) -> f64 {
    let n = gains.len();
    let mut best = f64::NEG_INFINITY;
    for full in 0u32..(1 << n) {
        let at_cap = full.count_ones() as f64 * cap;
        let base: f64 = (0..n).filter(|&i| full >> i & 1 == 1).map(|i| gains[i] * cap).sum();
        let rest = budget - at_cap;
        if rest.abs() <= 1e-15 * budget.max(1.0) {
            best = best.max(base);
        }
        for f in (0..n).filter(|&i| full >> i & 1 == 0) {
            if rest >= 0.0 && rest <= cap {
                best = best.max(base + gains[f] * rest);
            }
        }
    }
    best
}

/// Water level by bisection on `sum (mu - 1/g)^+ = budget`.
pub fn bisected_water_level(gains: &[f64], budget: f64) -> f64 {
    let used = |mu: f64| gains.iter().filter(|&&g| g > 0.0).map(|&g| (mu - 1.0 / g).max(0.0)).sum::<f64>();
    let mut lo = 0.0;
    let mut hi = budget + gains.iter().filter(|&&g| g > 0.0).map(|&g| 1.0 / g).fold(0.0, f64::min) + budget;
    while used(hi) < budget {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(mid) < budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest violation of the water-filling optimality conditions, relative
/// to the water level: active subcarriers must sit at `mu`, inactive ones
/// must have a floor `1/g` at or above it.
pub fn kkt_residual(gains: &[f64], powers: &[f64], mu: f64) -> f64 {
    gains
        .iter()
        .zip(powers)
        .map(|(&g, &p)| {
            let floor = if g > 0.0 { 1.0 / g } else { f64::INFINITY };
            if p > 0.0 {
                ((p + floor) - mu).abs() / mu
            } else {
                (mu - floor).max(0.0) / mu
            }
        })
        .fold(0.0, f64::max)
}

pub fn capacity(gains: &[f64], powers: &[f64]) -> f64 {
    gains.iter().zip(powers).map(|(&g, &p)| (g * p).ln_1p()).sum::<f64>() / std::f64::consts::LN_2
}
