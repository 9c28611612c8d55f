//! Time-switching (TS) and power-splitting (PS) reference receivers.
//!
//! Both see all K subcarriers at the same transmit powers as FS.
//! TS spends a fraction `alpha` of the frame harvesting, so
//! `Q(alpha) = alpha * sum Q_k` and `C(alpha) = (1 - alpha) * sum C_k`.
//! PS sends a fraction `rho` of the received power to the harvester, so
//! `Q(rho) = rho * sum Q_k` and `C(rho) = sum B log2(1 + (1 - rho) |H_k|^2 gamma_k)`.

use crate::error::{check_len, Result};
use crate::rf_model::{ChannelRealization, PowerVector, SubcarrierMetrics};

/// Absolute bisection tolerance on the splitting ratio.
pub const PS_RATIO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Maximize capacity subject to `Q >= Q_min`.
    Capacity,
    /// Maximize harvested power subject to `C >= C_min`.
    Harvest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchSolution {
    /// `alpha` for TS, `rho` for PS.
    pub ratio: f64,
    pub capacity: f64,
    pub harvested: f64,
    pub feasible: bool,
}

/// Optimal time-switching fraction for the given objective and floor.
pub fn ts_solve(m: &SubcarrierMetrics, objective: Objective, threshold: f64) -> SwitchSolution {
    let total_c = m.total_capacity();
    let total_q = m.total_harvest();
    let (alpha, feasible) = match objective {
        Objective::Capacity => {
            if threshold > total_q {
                (1.0, false)
            } else if threshold <= 0.0 {
                (0.0, true)
            } else {
                ((threshold / total_q).clamp(0.0, 1.0), true)
            }
        }
        Objective::Harvest => {
            if threshold > total_c {
                (0.0, false)
            } else if threshold <= 0.0 {
                (1.0, true)
            } else {
                ((1.0 - threshold / total_c).clamp(0.0, 1.0), true)
            }
        }
    };
    SwitchSolution { ratio: alpha, capacity: (1.0 - alpha) * total_c, harvested: alpha * total_q, feasible }
}

/// Capacity with a fraction `rho` of the received power split off.
pub fn ps_capacity(ch: &ChannelRealization, p: &PowerVector, rho: f64) -> Result<f64> {
    check_len(ch.num_subcarriers(), p.len())?;
    let keep = 1.0 - rho;
    let noise = ch.noise_variance_w();
    let b = ch.bandwidth_hz();
    Ok(p
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, &pk)| b * (keep * ch.power_gain(k) * pk / noise).ln_1p() / std::f64::consts::LN_2)
        .sum())
}

/// Optimal power-splitting ratio for the given objective and floor.
///
/// For the harvest objective `C(rho)` is strictly decreasing, and the ratio
/// is bisected on `[0, 1]`, always keeping the bracket end that still meets
/// `C_min`.
pub fn ps_solve(
    m: &SubcarrierMetrics,
    ch: &ChannelRealization,
    p: &PowerVector,
    objective: Objective,
    threshold: f64,
) -> Result<SwitchSolution> {
    check_len(m.len(), p.len())?;
    let total_q = m.total_harvest();
    let solution = |rho: f64, feasible: bool| -> Result<SwitchSolution> {
        Ok(SwitchSolution { ratio: rho, capacity: ps_capacity(ch, p, rho)?, harvested: rho * total_q, feasible })
    };
    match objective {
        Objective::Capacity => {
            if threshold > total_q {
                solution(1.0, false)
            } else if threshold <= 0.0 {
                solution(0.0, true)
            } else {
                solution((threshold / total_q).clamp(0.0, 1.0), true)
            }
        }
        Objective::Harvest => {
            let full = ps_capacity(ch, p, 0.0)?;
            if full < threshold {
                return solution(0.0, false);
            }
            if threshold <= 0.0 {
                return solution(1.0, true);
            }
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            while hi - lo > PS_RATIO_TOL {
                let mid = 0.5 * (lo + hi);
                if ps_capacity(ch, p, mid)? >= threshold {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            solution(lo, true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf_model::compute_metrics;
    use num_complex::Complex64;

    fn setup() -> (ChannelRealization, PowerVector, SubcarrierMetrics) {
        let gains = [0.4, 1.3, 2.2, 0.05].iter().map(|&g: &f64| Complex64::new(0.0, g.sqrt())).collect();
        let ch = ChannelRealization::uniform(15_000.0, 1e-5, gains, 0.5).unwrap();
        let p = PowerVector::equal(4, 0.002).unwrap();
        let m = compute_metrics(&ch, &p).unwrap();
        (ch, p, m)
    }

    #[test]
    fn ts_half_split() {
        let m = SubcarrierMetrics::from_values(vec![100.0; 4], vec![0.006; 4]).unwrap();
        let s = ts_solve(&m, Objective::Capacity, 0.012);
        assert!((s.ratio - 0.5).abs() < 1e-12);
        assert!((s.capacity - 200.0).abs() < 1e-9);
        assert!(s.feasible);
    }

    #[test]
    fn ts_edges() {
        let (_, _, m) = setup();
        let s = ts_solve(&m, Objective::Capacity, 0.0);
        assert_eq!(s.ratio, 0.0);
        assert_eq!(s.capacity, m.total_capacity());
        let s = ts_solve(&m, Objective::Harvest, m.total_capacity());
        assert_eq!(s.ratio, 0.0);
        assert_eq!(s.harvested, 0.0);
        assert!(s.feasible);
        assert!(!ts_solve(&m, Objective::Capacity, 1.0).feasible);
        assert!(!ts_solve(&m, Objective::Harvest, 2.0 * m.total_capacity()).feasible);
    }

    #[test]
    fn ps_endpoints() {
        let (ch, p, m) = setup();
        assert!((ps_capacity(&ch, &p, 0.0).unwrap() - m.total_capacity()).abs() < 1e-9);
        assert_eq!(ps_capacity(&ch, &p, 1.0).unwrap(), 0.0);
        let s = ps_solve(&m, &ch, &p, Objective::Harvest, 0.0).unwrap();
        assert_eq!(s.ratio, 1.0);
        assert!((s.harvested - m.total_harvest()).abs() < 1e-15);
    }

    #[test]
    fn ps_bisection_inverts_forward_model() {
        let (ch, p, m) = setup();
        let target = ps_capacity(&ch, &p, 0.5).unwrap();
        let s = ps_solve(&m, &ch, &p, Objective::Harvest, target).unwrap();
        assert!((s.ratio - 0.5).abs() < 1e-9, "{}", s.ratio);
        assert!(s.capacity >= target);
        assert!(s.feasible);
    }

    #[test]
    fn ps_capacity_objective_meets_floor() {
        let (ch, p, m) = setup();
        let q_min = 0.3 * m.total_harvest();
        let s = ps_solve(&m, &ch, &p, Objective::Capacity, q_min).unwrap();
        assert!((s.harvested - q_min).abs() <= 1e-9 * q_min);
        assert!(s.capacity > ts_solve(&m, Objective::Capacity, q_min).capacity);
    }

    #[test]
    fn ps_infeasible() {
        let (ch, p, m) = setup();
        let s = ps_solve(&m, &ch, &p, Objective::Harvest, m.total_capacity() * 1.01).unwrap();
        assert!(!s.feasible);
        let s = ps_solve(&m, &ch, &p, Objective::Capacity, m.total_harvest() * 1.01).unwrap();
        assert!(!s.feasible);
    }

    #[test]
    fn ps_monotone_in_ratio() {
        let (ch, p, _) = setup();
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let c = ps_capacity(&ch, &p, i as f64 / 100.0).unwrap();
            assert!(c < prev);
            prev = c;
        }
    }
}
