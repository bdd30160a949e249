//! Gap-existence on lop-sided interval instances with a million impressions
//! that are never materialized.
//!
//!     cargo run --release --example gap_existence

use streammatch::gap::{gap_decide_with, CountingOracle};
use streammatch::gen::{gen_lopsided_interval, LopsidedSpec, PlantedAnswer};

fn main() -> streammatch::Result<()> {
    for (seed, answer) in [(1, PlantedAnswer::Yes), (2, PlantedAnswer::StrongNo)] {
        let spec = LopsidedSpec {
            total_budget: Some(60),
            answer,
            ..LopsidedSpec::new(20, 1_000_000, 5, seed)
        };
        let inst = gen_lopsided_interval(&spec)?.instance;
        let oracle = CountingOracle::new(&inst);
        let out = gap_decide_with(&inst.budgets(), inst.n_impressions, &oracle, 0.2)?;
        println!(
            "planted {answer:?}: decided {} after {} passes, peak active set {} (limit {}), {} impressions revealed",
            out.decision,
            out.passes,
            out.peak_active_set,
            5.0 * out.sum_budgets as f64 / 0.2,
            oracle.revealed().len()
        );
    }
    Ok(())
}
