//! Gap-existence for lop-sided advertiser/impression graphs.
//!
//! The impression side may be far too large to store, so the solver only
//! sees it through two oracle calls and keeps an explicit active set of
//! materialized impressions. Budgets are simulated by copies of each
//! advertiser. After `k` passes of discretized water-filling the answer is
//! YES iff the support admits a matching with budgets `floor((1 - eps) B_a)`.

mod instance;
mod oracle;
mod solver;

pub use instance::{
    interval_feasibility, parse_gap_instance, write_gap_instance, Advertiser, GapInstance, Neighborhood,
    MATERIALIZE_MAX_IMPRESSIONS,
};
pub use oracle::{ActiveSet, AdjacencyOracle, CountingOracle};
pub use solver::{
    gap_decide, gap_decide_with, process_advertiser, run_gap_passes, run_gap_passes_with, Decision, GapOutcome,
    GapState,
};
