//! Exact subcarrier allocation for the two problems:
//!
//! * **P1**: maximize `C_T` subject to `Q_T >= Q_min`. Choosing S is a
//!   knapsack with values `C_k`, weights `Q_k` and capacity
//!   `Q_th = sum Q - Q_min`.
//! * **P2**: maximize `Q_T` subject to `C_T >= C_min`. Choosing S^c is a
//!   knapsack with values `Q_k`, weights `C_k` and capacity
//!   `C_th = sum C - C_min`.
//!
//! Real-valued metrics are quantized before the DP. Weights round up and
//! capacity never exceeds `resolution` weight units, so anything the DP
//! accepts is feasible for the real-valued problem as well.

use crate::allocation::knapsack::{brute_force_solve, dp_solve_with_budget, KnapsackInstance, DEFAULT_MAX_CELLS};
use crate::allocation::relaxation::{upper_bound_c, upper_bound_q};
use crate::error::{Error, Result};
use crate::rf_model::{totals, AllocationMask, SubcarrierMetrics};

/// Default number of weight bins across the knapsack capacity.
pub const DEFAULT_RESOLUTION: u64 = 1 << 14;

/// Values are scaled so the largest item is worth this many units.
const VALUE_UNITS: f64 = (1u64 << 30) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    /// Maximize capacity under a harvest floor.
    P1,
    /// Maximize harvest under a capacity floor.
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Dp,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub resolution: u64,
    pub solver: Solver,
    /// DP table budget in cells.
    pub max_cells: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { resolution: DEFAULT_RESOLUTION, solver: Solver::Dp, max_cells: DEFAULT_MAX_CELLS }
    }
}

impl SolveOptions {
    pub fn with_resolution(resolution: u64) -> Self {
        Self { resolution, ..Self::default() }
    }
}

/// Result of one allocation solve, evaluated on the unquantized metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub problem: Problem,
    pub mask: AllocationMask,
    /// `C_T` for P1, `Q_T` for P2.
    pub objective: f64,
    /// The constrained quantity: `Q_T` for P1, `C_T` for P2.
    pub constraint_used: f64,
    pub upper_bound: Option<f64>,
    pub feasible: bool,
    pub solver: Solver,
}

/// Knapsack over values `v`, weights `w` with real capacity `w_th >= 0`.
fn quantize(v: &[f64], w: &[f64], w_th: f64, resolution: u64) -> Result<KnapsackInstance> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be at least 1".into()));
    }
    let v_max = v.iter().copied().fold(0.0, f64::max);
    let v_unit = if v_max > 0.0 { v_max / VALUE_UNITS } else { 1.0 };

    let n = w.len() as u64;
    let w_sum: f64 = w.iter().sum();
    let (w_unit, capacity) = if w_th > 0.0 {
        if w_sum <= w_th && resolution > n {
            // Every item fits at once; leave one unit of headroom per item so
            // rounding up cannot push the full selection over capacity.
            (w_th / (resolution - n) as f64, resolution)
        } else {
            (w_th / resolution as f64, resolution)
        }
    } else {
        // Only weightless items fit; any positive unit maps Q > 0 to >= 1.
        (if w_sum > 0.0 { w_sum / resolution as f64 } else { 1.0 }, 0)
    };

    let mut values = Vec::new();
    let mut weights = Vec::new();
    let mut map = Vec::new();
    for (k, (&vk, &wk)) in v.iter().zip(w).enumerate() {
        let units = (wk / w_unit).ceil();
        if units > capacity as f64 {
            continue;
        }
        values.push((vk / v_unit).round() as u64);
        weights.push(units as u64);
        map.push(k);
    }
    KnapsackInstance::with_scales(values, weights, capacity, v_unit, w_unit, map)
}

pub fn build_p1_instance(m: &SubcarrierMetrics, q_min: f64, resolution: u64) -> Result<KnapsackInstance> {
    let total_q = m.total_harvest();
    let q_th = total_q - q_min;
    if q_th < 0.0 {
        return Err(Error::InfeasibleConstraint { required: q_min, available: total_q });
    }
    quantize(m.capacities(), m.harvests(), q_th, resolution)
}

pub fn build_p2_instance(m: &SubcarrierMetrics, c_min: f64, resolution: u64) -> Result<KnapsackInstance> {
    let total_c = m.total_capacity();
    let c_th = total_c - c_min;
    if c_th < 0.0 {
        return Err(Error::InfeasibleConstraint { required: c_min, available: total_c });
    }
    quantize(m.harvests(), m.capacities(), c_th, resolution)
}

pub fn solve_p1(m: &SubcarrierMetrics, q_min: f64, resolution: u64) -> Result<SolveOutcome> {
    solve(Problem::P1, m, q_min, &SolveOptions::with_resolution(resolution))
}

pub fn solve_p2(m: &SubcarrierMetrics, c_min: f64, resolution: u64) -> Result<SolveOutcome> {
    solve(Problem::P2, m, c_min, &SolveOptions::with_resolution(resolution))
}

/// Solves P1 (`threshold = Q_min`) or P2 (`threshold = C_min`).
///
/// An unreachable threshold is not an error: the outcome comes back with
/// `feasible = false` and the mask that comes closest (everything harvested
/// for P1, everything decoded for P2).
pub fn solve(problem: Problem, m: &SubcarrierMetrics, threshold: f64, opts: &SolveOptions) -> Result<SolveOutcome> {
    let built = match problem {
        Problem::P1 => build_p1_instance(m, threshold, opts.resolution),
        Problem::P2 => build_p2_instance(m, threshold, opts.resolution),
    };
    let inst = match built {
        Ok(inst) => inst,
        Err(Error::InfeasibleConstraint { .. }) => return infeasible(problem, m, opts.solver),
        Err(e) => return Err(e),
    };

    let k = m.len();
    let mut capacity = inst.capacity();
    loop {
        let attempt = inst.with_capacity(capacity);
        let sel = match opts.solver {
            Solver::Dp => dp_solve_with_budget(&attempt, opts.max_cells)?,
            Solver::BruteForce => brute_force_solve(&attempt)?,
        };
        let mut selected = vec![false; k];
        for (item, &chosen) in sel.chosen.iter().enumerate() {
            if chosen {
                selected[attempt.item_index_map()[item]] = true;
            }
        }
        let mask = match problem {
            Problem::P1 => AllocationMask::from_bits(selected),
            Problem::P2 => AllocationMask::from_bits(selected).complement(),
        };
        let (c_t, q_t) = totals(m, &mask)?;
        let (objective, constraint_used) = match problem {
            Problem::P1 => (c_t, q_t),
            Problem::P2 => (q_t, c_t),
        };
        // Rounding up weights makes this hold in exact arithmetic; floating
        // point summation can still land one ulp short on a tight selection.
        if constraint_used >= threshold || capacity == 0 {
            let upper_bound = match problem {
                Problem::P1 => upper_bound_c(m, threshold)?.value,
                Problem::P2 => upper_bound_q(m, threshold)?.value,
            };
            return Ok(SolveOutcome {
                problem,
                mask,
                objective,
                constraint_used,
                upper_bound: Some(upper_bound),
                feasible: constraint_used >= threshold,
                solver: opts.solver,
            });
        }
        capacity -= 1;
    }
}

fn infeasible(problem: Problem, m: &SubcarrierMetrics, solver: Solver) -> Result<SolveOutcome> {
    let mask = match problem {
        Problem::P1 => AllocationMask::all_harvest(m.len()),
        Problem::P2 => AllocationMask::all_info(m.len()),
    };
    let (c_t, q_t) = totals(m, &mask)?;
    let (objective, constraint_used) = match problem {
        Problem::P1 => (c_t, q_t),
        Problem::P2 => (q_t, c_t),
    };
    Ok(SolveOutcome { problem, mask, objective, constraint_used, upper_bound: None, feasible: false, solver })
}
