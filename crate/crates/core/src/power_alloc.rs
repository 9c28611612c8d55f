//! Transmit power allocation over a fixed subcarrier partition.
//!
//! The information set S gets water-filling (capacity is concave in power);
//! the energy set S^c gets a linear objective, so power goes to the best
//! harvesting subcarriers, either all of it to the single best one or, with
//! a per-subcarrier cap, greedily in decreasing gain order.

use std::cmp::Ordering;

use crate::allocation::{solve, Problem, SolveOptions, SolveOutcome};
use crate::error::{Error, Result};
use crate::rf_model::{compute_metrics, totals, ChannelRealization, PowerVector};

/// Total power and optional per-subcarrier ceiling for one subcarrier set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub total: f64,
    pub per_subcarrier_cap: Option<f64>,
}

impl PowerBudget {
    pub fn new(total: f64, per_subcarrier_cap: Option<f64>) -> Result<Self> {
        if !(total >= 0.0 && total.is_finite()) {
            return Err(Error::InvalidParameter(format!("power budget {total} must be non-negative")));
        }
        if let Some(cap) = per_subcarrier_cap {
            if cap.is_nan() || cap <= 0.0 {
                return Err(Error::InvalidParameter(format!("power cap {cap} must be positive")));
            }
        }
        Ok(Self { total, per_subcarrier_cap })
    }

    /// Whether `n` subcarriers can absorb the whole budget under the cap.
    pub fn fits(&self, n: usize) -> bool {
        self.per_subcarrier_cap.is_none_or(|cap| self.total <= cap * n as f64)
    }
}

/// Water-filling solution `P_k = (mu - 1/g_k)^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFill {
    pub powers: Vec<f64>,
    /// `mu`, in the same units as the budget.
    pub water_level: f64,
}

impl WaterFill {
    /// Lagrange multiplier of the sum-power constraint for bandwidth `b`:
    /// the water level equals `B / (lambda ln 2)`.
    pub fn lagrange_multiplier(&self, bandwidth_hz: f64) -> f64 {
        bandwidth_hz / (self.water_level * std::f64::consts::LN_2)
    }
}

/// Capacity-maximizing split of `budget` over subcarriers with normalized
/// gains `g_k = |H_k|^2 / sigma^2`.
///
/// The active set is always a prefix of the subcarriers sorted by gain, so
/// the water level has the closed form `mu = (budget + sum 1/g) / |active|`
/// for the largest prefix whose weakest member still sits below `mu`.
pub fn waterfill(power_gains: &[f64], budget: f64) -> Result<WaterFill> {
    if !(budget >= 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter(format!("power budget {budget} must be non-negative")));
    }
    if power_gains.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
        return Err(Error::InvalidParameter("power gains must be finite and non-negative".into()));
    }
    let n = power_gains.len();
    let mut order: Vec<usize> = (0..n).filter(|&k| power_gains[k] > 0.0).collect();
    if order.is_empty() {
        if budget > 0.0 {
            return Err(if n == 0 { Error::EmptySet } else { Error::DegenerateChannel });
        }
        return Ok(WaterFill { powers: vec![0.0; n], water_level: 0.0 });
    }
    order.sort_by(|&a, &b| power_gains[b].partial_cmp(&power_gains[a]).unwrap_or(Ordering::Equal));
    let floors: Vec<f64> = order.iter().map(|&k| 1.0 / power_gains[k]).collect();

    let mut active = 1;
    let mut floor_sum = floors[0];
    for (m, &floor) in floors.iter().enumerate().skip(1) {
        let candidate = (budget + floor_sum + floor) / (m + 1) as f64;
        if floor >= candidate {
            break;
        }
        active = m + 1;
        floor_sum += floor;
    }

    // Powers are measured from the weakest active floor so that rounding
    // scales with the budget rather than with 1/g.
    let top = floors[active - 1];
    let offsets: Vec<f64> = floors[..active].iter().map(|&f| top - f).collect();
    let mut excess = ((budget - offsets.iter().sum::<f64>()) / active as f64).max(0.0);
    let spent: f64 = offsets.iter().map(|&d| d + excess).sum();
    excess += (budget - spent) / active as f64;

    let mut powers = vec![0.0; n];
    for (&k, &d) in order.iter().zip(&offsets) {
        powers[k] = (d + excess).max(0.0);
    }
    let level = top + excess;
    Ok(WaterFill { powers, water_level: level })
}

/// Index of the largest gain, lowest index on ties.
fn argmax(gains: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, &g) in gains.iter().enumerate() {
        if best.is_none_or(|b| g > gains[b]) {
            best = Some(k);
        }
    }
    best
}

/// Entire budget on the subcarrier with the largest `eta_k |H_k|^2`.
pub fn single_best_alloc(harvest_gains: &[f64], budget: f64) -> Result<PowerVector> {
    if !(budget >= 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter(format!("power budget {budget} must be non-negative")));
    }
    let best = argmax(harvest_gains).ok_or(Error::EmptySet)?;
    let mut powers = vec![0.0; harvest_gains.len()];
    powers[best] = budget;
    PowerVector::new(powers)
}

/// Maximizes `sum gain_k P_k` with `sum P_k <= budget`, `0 <= P_k <= cap`.
///
/// A single budget row over box constraints: filling subcarriers to the cap
/// in decreasing gain order is LP-optimal.
pub fn capped_alloc(harvest_gains: &[f64], budget: f64, cap: f64) -> Result<PowerVector> {
    let limits = PowerBudget::new(budget, Some(cap))?;
    if harvest_gains.is_empty() {
        return Err(Error::EmptySet);
    }
    if !limits.fits(harvest_gains.len()) {
        return Err(Error::ResourceInfeasible { budget, limit: cap * harvest_gains.len() as f64 });
    }
    let mut order: Vec<usize> = (0..harvest_gains.len()).collect();
    order.sort_by(|&a, &b| harvest_gains[b].partial_cmp(&harvest_gains[a]).unwrap_or(Ordering::Equal));
    let mut powers = vec![0.0; harvest_gains.len()];
    let mut remaining = budget;
    for k in order {
        if remaining <= 0.0 {
            break;
        }
        let p = cap.min(remaining);
        powers[k] = p;
        remaining -= p;
    }
    PowerVector::new(powers)
}

/// FS-SPA: subcarrier allocation followed by power allocation on one of the sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaMode {
    /// Maximize capacity (P1), then water-fill over S.
    CapacityWaterfill,
    /// Maximize harvest (P2), then reallocate over S^c (capped if a cap is given).
    HarvestConcentrate,
}

impl SpaMode {
    pub fn problem(self) -> Problem {
        match self {
            SpaMode::CapacityWaterfill => Problem::P1,
            SpaMode::HarvestConcentrate => Problem::P2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaConfig {
    pub mode: SpaMode,
    /// `Q_min` (W) or `C_min` (bits/s).
    pub threshold: f64,
    /// `P_t,e`, the equal per-subcarrier power the allocation starts from.
    pub equal_power_w: f64,
    /// `P_t,max` for the energy set; `None` sends all of it to one subcarrier.
    pub cap_w: Option<f64>,
    pub iterations: usize,
    pub solve: SolveOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaOutcome {
    /// Allocation from the first pass at equal power (FS-SA).
    pub equal_power: SolveOutcome,
    /// Final mask with objective and constraint under `powers`. No relaxation
    /// bound is attached, since the bound assumes equal power.
    pub outcome: SolveOutcome,
    pub powers: PowerVector,
}

/// Runs `iterations` rounds of allocate-then-reallocate on one channel draw.
///
/// Each round solves the allocation problem under the current powers, then
/// resets every subcarrier to `P_t,e` and redistributes the set's share
/// (`P_t,e * |S|` or `P_t,e * |S^c|`) within that set. Power never moves
/// between the two sets. An infeasible allocation ends the run with PA skipped.
pub fn spa_pipeline(ch: &ChannelRealization, cfg: &SpaConfig) -> Result<SpaOutcome> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidParameter("SPA needs at least one iteration".into()));
    }
    let k = ch.num_subcarriers();
    let problem = cfg.mode.problem();
    let baseline = PowerVector::equal(k, cfg.equal_power_w)?;
    let mut powers = baseline.clone();
    let mut first: Option<SolveOutcome> = None;
    let mut last = None;

    for _ in 0..cfg.iterations {
        let metrics = compute_metrics(ch, &powers)?;
        let sa = solve(problem, &metrics, cfg.threshold, &cfg.solve)?;
        let equal_power = first.get_or_insert_with(|| sa.clone()).clone();
        if !sa.feasible {
            return Ok(SpaOutcome { equal_power, outcome: sa, powers });
        }

        let mut next = baseline.clone().into_inner();
        match cfg.mode {
            SpaMode::CapacityWaterfill => {
                let set = sa.mask.info_indices();
                if !set.is_empty() {
                    let noise = ch.noise_variance_w();
                    let gains: Vec<f64> = set.iter().map(|&i| ch.power_gain(i) / noise).collect();
                    let budget = cfg.equal_power_w * set.len() as f64;
                    let alloc = match waterfill(&gains, budget) {
                        Ok(wf) => wf.powers,
                        // Zero capacity whatever we do; keep the power unspent.
                        Err(Error::DegenerateChannel) => vec![0.0; set.len()],
                        Err(e) => return Err(e),
                    };
                    for (&i, p) in set.iter().zip(alloc) {
                        next[i] = p;
                    }
                }
            }
            SpaMode::HarvestConcentrate => {
                let set = sa.mask.harvest_indices();
                if !set.is_empty() {
                    let gains: Vec<f64> = set.iter().map(|&i| ch.efficiencies()[i] * ch.power_gain(i)).collect();
                    let budget = cfg.equal_power_w * set.len() as f64;
                    let alloc = match cfg.cap_w {
                        Some(cap) => capped_alloc(&gains, budget, cap)?,
                        None => single_best_alloc(&gains, budget)?,
                    };
                    for (&i, &p) in set.iter().zip(alloc.as_slice()) {
                        next[i] = p;
                    }
                }
            }
        }
        powers = PowerVector::new(next)?;

        let metrics = compute_metrics(ch, &powers)?;
        let (c_t, q_t) = totals(&metrics, &sa.mask)?;
        let (objective, constraint_used) = match problem {
            Problem::P1 => (c_t, q_t),
            Problem::P2 => (q_t, c_t),
        };
        last = Some(SolveOutcome {
            objective,
            constraint_used,
            upper_bound: None,
            feasible: constraint_used >= cfg.threshold,
            ..sa
        });
    }

    let outcome = last.expect("at least one iteration ran");
    let equal_power = first.expect("at least one iteration ran");
    Ok(SpaOutcome { equal_power, outcome, powers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn waterfill_symmetric() {
        let wf = waterfill(&[5.0, 5.0], 0.004).unwrap();
        assert!((wf.powers[0] - 0.002).abs() < 1e-15);
        assert!((wf.powers[1] - 0.002).abs() < 1e-15);
    }

    #[test]
    fn waterfill_single() {
        let wf = waterfill(&[0.3], 4.0).unwrap();
        assert!((wf.powers[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn waterfill_two_levels() {
        // 1/g = [1, 2], mu = (4 + 3) / 2 = 3.5.
        let wf = waterfill(&[1.0, 0.5], 4.0).unwrap();
        assert!((wf.water_level - 3.5).abs() < 1e-12);
        assert!((wf.powers[0] - 2.5).abs() < 1e-12);
        assert!((wf.powers[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn waterfill_drops_weak_channel() {
        // 1/g = [1, 10]: mu over both would be 5.5 < 10, so only the first is active.
        let wf = waterfill(&[1.0, 0.1], 1.0).unwrap();
        assert_eq!(wf.powers, vec![1.0, 0.0]);
        assert!((wf.water_level - 2.0).abs() < 1e-12);
        assert!((wf.lagrange_multiplier(1.0) - 1.0 / (2.0 * std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn waterfill_degenerate() {
        assert!(matches!(waterfill(&[0.0, 0.0], 1.0), Err(Error::DegenerateChannel)));
        assert_eq!(waterfill(&[0.0, 0.0], 0.0).unwrap().powers, vec![0.0, 0.0]);
        assert!(matches!(waterfill(&[], 1.0), Err(Error::EmptySet)));
        let wf = waterfill(&[0.0, 2.0], 1.0).unwrap();
        assert_eq!(wf.powers, vec![0.0, 1.0]);
    }

    #[test]
    fn single_best_examples() {
        let p = single_best_alloc(&[0.3, 0.9, 0.1], 0.004).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 0.004, 0.0]);
        assert_eq!(single_best_alloc(&[0.2], 0.004).unwrap().as_slice(), &[0.004]);
        let tied = single_best_alloc(&[0.1, 0.7, 0.2, 0.3, 0.7], 1.0).unwrap();
        assert_eq!(tied.as_slice(), &[0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(single_best_alloc(&[], 1.0), Err(Error::EmptySet)));
    }

    #[test]
    fn capped_examples() {
        let p = capped_alloc(&[0.6, 0.5, 0.1], 0.004, 0.0024).unwrap();
        let expected = [0.0024, 0.0016, 0.0];
        for (a, b) in p.as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let objective: f64 = p.as_slice().iter().zip([0.6, 0.5, 0.1]).map(|(p, g)| p * g).sum();
        assert!((objective - 0.00224).abs() < 1e-15);

        let loose = capped_alloc(&[0.6, 0.5, 0.9], 0.004, 0.01).unwrap();
        assert_eq!(loose, single_best_alloc(&[0.6, 0.5, 0.9], 0.004).unwrap());

        let full = capped_alloc(&[0.6, 0.5, 0.1], 0.003, 0.001).unwrap();
        assert_eq!(full.as_slice(), &[0.001, 0.001, 0.001]);
    }

    #[test]
    fn capped_errors() {
        assert!(matches!(capped_alloc(&[1.0, 2.0], 5.0, 2.0), Err(Error::ResourceInfeasible { .. })));
        assert!(matches!(capped_alloc(&[1.0], 1.0, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(capped_alloc(&[], 0.0, 1.0), Err(Error::EmptySet)));
    }

    #[test]
    fn budget_fits() {
        let b = PowerBudget::new(4.0, Some(2.0)).unwrap();
        assert!(b.fits(2));
        assert!(!b.fits(1));
        assert!(PowerBudget::new(4.0, None).unwrap().fits(1));
        assert!(PowerBudget::new(-1.0, None).is_err());
        assert!(PowerBudget::new(1.0, Some(0.0)).is_err());
    }
}
