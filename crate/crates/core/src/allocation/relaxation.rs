//! Continuous-relaxation upper bounds for both allocation problems.
//!
//! Subcarriers are ranked by capacity per harvested watt, `C_k / Q_k`,
//! highest first. With fractional allocations allowed, the capacity problem
//! fills the information set from the front of that ranking until the
//! harvest budget runs out, and the harvest problem fills the energy set
//! from the back until the capacity budget runs out. In both cases exactly
//! one critical subcarrier ends up split.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::rf_model::SubcarrierMetrics;

/// Subcarrier indices sorted by decreasing `C_k / Q_k`.
///
/// `Q_k = 0` counts as an infinite ratio when `C_k > 0` (placed first) and
/// sorts last when `C_k = 0` too. Equal ratios keep ascending index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxationOrder {
    indices: Vec<usize>,
    critical: Option<usize>,
}

impl RelaxationOrder {
    /// `l_1, ..., l_K` as zero-based subcarrier indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Zero-based position (into [`indices`](Self::indices)) of the critical
    /// subcarrier, absent when the constraint never binds.
    pub fn critical_position(&self) -> Option<usize> {
        self.critical
    }

    pub fn critical_subcarrier(&self) -> Option<usize> {
        self.critical.map(|d| self.indices[d])
    }
}

#[derive(Debug, Clone, Copy)]
enum RatioKey {
    Infinite,
    Finite(f64),
    Empty,
}

fn ratio_key(c: f64, q: f64) -> RatioKey {
    match (c > 0.0, q > 0.0) {
        (_, true) => RatioKey::Finite(c / q),
        (true, false) => RatioKey::Infinite,
        (false, false) => RatioKey::Empty,
    }
}

fn cmp_keys(a: RatioKey, b: RatioKey) -> Ordering {
    use RatioKey::*;
    match (a, b) {
        (Infinite, Infinite) | (Empty, Empty) => Ordering::Equal,
        (Infinite, _) | (_, Empty) => Ordering::Less,
        (_, Infinite) | (Empty, _) => Ordering::Greater,
        // Descending ratio.
        (Finite(x), Finite(y)) => y.total_cmp(&x),
    }
}

pub fn relaxation_order(m: &SubcarrierMetrics) -> RelaxationOrder {
    let keys: Vec<RatioKey> = m.capacities().iter().zip(m.harvests()).map(|(&c, &q)| ratio_key(c, q)).collect();
    let mut indices: Vec<usize> = (0..m.len()).collect();
    // Stable sort keeps ascending index among ties.
    indices.sort_by(|&a, &b| cmp_keys(keys[a], keys[b]));
    RelaxationOrder { indices, critical: None }
}

/// Optimum of a relaxed allocation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedBound {
    /// `C_up` (bits/s) or `Q_up` (W).
    pub value: f64,
    /// Ordering with the critical position filled in.
    pub order: RelaxationOrder,
    /// Relaxed indicator per original subcarrier: `s_hat` for the capacity
    /// bound, `s_hat^c` for the harvest bound. Entries lie in `[0, 1]`.
    pub fractional: Vec<f64>,
}

/// `C_up` for maximizing capacity subject to harvesting at least `q_min`.
pub fn upper_bound_c(m: &SubcarrierMetrics, q_min: f64) -> Result<RelaxedBound> {
    let total_q = m.total_harvest();
    let q_th = total_q - q_min;
    if q_th < 0.0 {
        return Err(Error::InfeasibleConstraint { required: q_min, available: total_q });
    }
    let (c, q) = (m.capacities(), m.harvests());
    let mut order = relaxation_order(m);
    let mut fractional = vec![0.0; m.len()];

    let mut prefix = 0.0;
    let mut critical = None;
    for (pos, &k) in order.indices.iter().enumerate() {
        prefix += q[k];
        if prefix > q_th {
            critical = Some(pos);
            break;
        }
    }

    let value = match critical {
        None => {
            fractional.fill(1.0);
            m.total_capacity()
        }
        Some(d) => {
            let head = &order.indices[..d];
            let l_d = order.indices[d];
            let tail_q: f64 = order.indices[d..].iter().map(|&k| q[k]).sum();
            let frac = ((tail_q - q_min) / q[l_d]).clamp(0.0, 1.0);
            for &k in head {
                fractional[k] = 1.0;
            }
            fractional[l_d] = frac;
            head.iter().map(|&k| c[k]).sum::<f64>() + c[l_d] / q[l_d] * (tail_q - q_min).max(0.0)
        }
    };
    order.critical = critical;
    Ok(RelaxedBound { value, order, fractional })
}

/// `Q_up` for maximizing harvested power subject to capacity at least `c_min`.
///
/// Uses the same ranking as [`upper_bound_c`]; the energy set grows from the
/// lowest-ratio end, and the critical position is the last one whose suffix
/// capacity sum still exceeds `C_th = sum C - c_min`.
pub fn upper_bound_q(m: &SubcarrierMetrics, c_min: f64) -> Result<RelaxedBound> {
    let total_c = m.total_capacity();
    let c_th = total_c - c_min;
    if c_th < 0.0 {
        return Err(Error::InfeasibleConstraint { required: c_min, available: total_c });
    }
    let (c, q) = (m.capacities(), m.harvests());
    let mut order = relaxation_order(m);
    let mut fractional = vec![0.0; m.len()];

    let mut suffix = 0.0;
    let mut critical = None;
    for (pos, &k) in order.indices.iter().enumerate().rev() {
        suffix += c[k];
        if suffix > c_th {
            critical = Some(pos);
            break;
        }
    }

    let value = match critical {
        None => {
            fractional.fill(1.0);
            m.total_harvest()
        }
        Some(d) => {
            let tail = &order.indices[d + 1..];
            let l_d = order.indices[d];
            let head_c: f64 = order.indices[..=d].iter().map(|&k| c[k]).sum();
            let frac = ((head_c - c_min) / c[l_d]).clamp(0.0, 1.0);
            for &k in tail {
                fractional[k] = 1.0;
            }
            fractional[l_d] = frac;
            tail.iter().map(|&k| q[k]).sum::<f64>() + q[l_d] / c[l_d] * (head_c - c_min).max(0.0)
        }
    };
    order.critical = critical;
    Ok(RelaxedBound { value, order, fractional })
}
