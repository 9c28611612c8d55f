//! Frequency-switching SWIPT receiver allocation.
//!
//! A frequency-switching receiver routes every subcarrier of a multi-carrier
//! frame either to the information decoder or to the energy harvester. This
//! crate chooses that split, exactly, with a 0/1 knapsack DP, bounds it with
//! the continuous relaxation, re-optimizes transmit power on each side, and
//! compares the result with time-switching and power-splitting receivers in
//! a seeded Monte Carlo sweep.
//!
//! ```
//! use swipt_core::allocation::solve_p1;
//! use swipt_core::rf_model::SubcarrierMetrics;
//!
//! // Capacities (bits/s) and harvestable powers (W) of three subcarriers.
//! let m = SubcarrierMetrics::from_values(vec![3.0, 2.0, 1.0], vec![2.0, 2.0, 1.0]).unwrap();
//! let out = solve_p1(&m, 2.0, 3 << 12).unwrap();
//! assert_eq!(out.mask.to_string(), "101");
//! assert_eq!(out.objective, 4.0);
//! ```

pub mod allocation;
pub mod baselines;
pub mod error;
pub mod power_alloc;
pub mod rf_model;
pub mod sim;

pub use error::{Error, Result};
