//! Exact reference solvers for tiny instances and greedy baselines.

mod baseline;
mod exact;

pub use baseline::{greedy_baseline_1d, greedy_baseline_2d};
pub use exact::{
    exact_1d, exact_2d, exact_knapsack_3prime, exact_orderings, exact_simplified, OracleResult, DEFAULT_GRID_STEP,
    EXACT_1D_MAX_CANDIDATES, EXACT_1D_MAX_ROWS, EXACT_2D_MAX_CANDIDATES, KNAPSACK_MAX_CANDIDATES, ORDERINGS_MAX_ITEMS,
};
