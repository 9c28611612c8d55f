//! Subcarrier allocation: exact knapsack solves and relaxation bounds.

pub mod knapsack;
pub mod relaxation;
pub mod solve;

pub use knapsack::{brute_force_solve, dp_solve, dp_solve_with_budget, KnapsackInstance, Selection};
pub use relaxation::{relaxation_order, upper_bound_c, upper_bound_q, RelaxationOrder, RelaxedBound};
pub use solve::{
    build_p1_instance, build_p2_instance, solve, solve_p1, solve_p2, Problem, SolveOptions, SolveOutcome, Solver,
    DEFAULT_RESOLUTION,
};
