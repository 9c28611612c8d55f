//! Integer 0/1 knapsack: an exact dynamic program and an exhaustive oracle.

use crate::error::{check_len, Error, Result};

/// Default cap on DP table cells (`(n + 1) * (capacity + 1)` u64 entries, 128 MiB).
pub const DEFAULT_MAX_CELLS: usize = 1 << 24;

/// Largest item count the exhaustive solver accepts.
pub const BRUTE_FORCE_MAX_ITEMS: usize = 24;

/// A quantized knapsack: maximize selected `values` with selected
/// `weights` summing to at most `capacity`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    values: Vec<u64>,
    weights: Vec<u64>,
    capacity: u64,
    value_scale: f64,
    weight_scale: f64,
    item_index_map: Vec<usize>,
}

impl KnapsackInstance {
    /// Items map one-to-one onto positions `0..n`, scales are 1.
    pub fn new(values: Vec<u64>, weights: Vec<u64>, capacity: u64) -> Result<Self> {
        let map = (0..values.len()).collect();
        Self::with_scales(values, weights, capacity, 1.0, 1.0, map)
    }

    pub fn with_scales(
        values: Vec<u64>,
        weights: Vec<u64>,
        capacity: u64,
        value_scale: f64,
        weight_scale: f64,
        item_index_map: Vec<usize>,
    ) -> Result<Self> {
        check_len(values.len(), weights.len())?;
        check_len(values.len(), item_index_map.len())?;
        if !(value_scale > 0.0 && weight_scale > 0.0) {
            return Err(Error::InvalidParameter("quantization scales must be positive".into()));
        }
        Ok(Self { values, weights, capacity, value_scale, weight_scale, item_index_map })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// Physical units per integer value step.
    pub fn value_scale(&self) -> f64 {
        self.value_scale
    }

    /// Physical units per integer weight step.
    pub fn weight_scale(&self) -> f64 {
        self.weight_scale
    }

    /// Original subcarrier index of each item.
    pub fn item_index_map(&self) -> &[usize] {
        &self.item_index_map
    }

    pub(crate) fn with_capacity(&self, capacity: u64) -> Self {
        Self { capacity, ..self.clone() }
    }
}

/// Chosen items (by item position) and their total integer value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub chosen: Vec<bool>,
    pub objective: u64,
}

impl Selection {
    pub fn weight(&self, inst: &KnapsackInstance) -> u64 {
        self.chosen.iter().zip(inst.weights()).filter(|(&c, _)| c).map(|(_, &w)| w).sum()
    }
}

pub fn dp_solve(inst: &KnapsackInstance) -> Result<Selection> {
    dp_solve_with_budget(inst, DEFAULT_MAX_CELLS)
}

/// Exact DP over remaining capacity.
///
/// The table holds `best[i][w]`, the optimum using items `i..n` within
/// capacity `w`. Reconstruction walks items in order and keeps an item
/// whenever doing so still reaches the optimum, so among tied optima the
/// selection containing the lowest-indexed items wins.
pub fn dp_solve_with_budget(inst: &KnapsackInstance, max_cells: usize) -> Result<Selection> {
    let n = inst.len();
    if n == 0 || inst.capacity == 0 && inst.weights.iter().all(|&w| w > 0) {
        return Ok(Selection { chosen: vec![false; n], objective: 0 });
    }
    let width = usize::try_from(inst.capacity)
        .ok()
        .and_then(|c| c.checked_add(1))
        .ok_or_else(|| Error::ResourceLimit(format!("capacity {} too large", inst.capacity)))?;
    let cells = (n + 1)
        .checked_mul(width)
        .filter(|&c| c <= max_cells)
        .ok_or_else(|| {
            Error::ResourceLimit(format!(
                "DP table of {} x {width} cells exceeds budget of {max_cells}; lower the resolution",
                n + 1
            ))
        })?;

    let mut best = vec![0u64; cells];
    for i in (0..n).rev() {
        let (cur, next) = best[i * width..(i + 2) * width].split_at_mut(width);
        let v = inst.values[i];
        match usize::try_from(inst.weights[i]) {
            Ok(wt) if wt < width => {
                cur[..wt].copy_from_slice(&next[..wt]);
                for w in wt..width {
                    cur[w] = next[w].max(next[w - wt] + v);
                }
            }
            _ => cur.copy_from_slice(next),
        }
    }

    let mut chosen = vec![false; n];
    let mut w = width - 1;
    for (i, slot) in chosen.iter_mut().enumerate() {
        let here = best[i * width + w];
        if here == best[(i + 1) * width + w] {
            // Taking item i might still tie; prefer taking it.
            let wt = inst.weights[i];
            if wt <= w as u64 {
                let rest = w - wt as usize;
                if best[(i + 1) * width + rest] + inst.values[i] == here {
                    *slot = true;
                    w = rest;
                }
            }
        } else {
            *slot = true;
            w -= inst.weights[i] as usize;
        }
    }
    Ok(Selection { chosen, objective: best[width - 1] })
}

/// Enumerates all `2^n` subsets. Test oracle; refuses more than
/// [`BRUTE_FORCE_MAX_ITEMS`] items.
pub fn brute_force_solve(inst: &KnapsackInstance) -> Result<Selection> {
    let n = inst.len();
    if n > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::ResourceLimit(format!(
            "brute force limited to {BRUTE_FORCE_MAX_ITEMS} items, got {n}"
        )));
    }
    let mut best_mask = 0u32;
    let mut best_value = 0u64;
    for mask in 0u32..(1u32 << n) {
        let mut weight = 0u64;
        let mut value = 0u64;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                weight = weight.saturating_add(inst.weights[i]);
                value += inst.values[i];
            }
        }
        if weight <= inst.capacity && value > best_value {
            best_value = value;
            best_mask = mask;
        }
    }
    let chosen = (0..n).map(|i| best_mask >> i & 1 == 1).collect();
    Ok(Selection { chosen, objective: best_value })
}
