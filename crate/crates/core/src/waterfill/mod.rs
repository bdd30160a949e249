//! Multipass fractional water-filling.
//!
//! Each arrival of a left vertex augments its capacity by one and pours one
//! unit of water onto its least loaded neighbors, raising them together to a
//! common level. Cycles that appear in the support are cancelled so the
//! support stays a forest with at most `n_p + n_q - 1` edges. Replaying the
//! stream `k` times yields a fractional matching of value
//! `sum_v min(k, load_v) / k`.

mod allocation;
pub(crate) mod forest;
mod water;

use num_rational::BigRational;

pub use allocation::{Allocation, FillOutcome};
pub use water::Water;

use crate::error::{Error, Result};
use crate::graph::ArrivalStream;

/// Largest graph the exact-rational path accepts.
pub const EXACT_MODE_MAX_EDGES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct PassConfig {
    pub passes: u32,
    /// New support edges to accumulate before cancelling cycles. `None`
    /// buffers `n_p + n_q` edges; `Some(1)` cancels after every arrival.
    /// Cycles are always cancelled at the end of a pass.
    pub cycle_buffer_edges: Option<usize>,
    pub tolerance: f64,
}

impl PassConfig {
    pub fn new(passes: u32) -> Self {
        PassConfig {
            passes,
            cycle_buffer_edges: None,
            tolerance: 1e-9,
        }
    }

    pub fn with_cycle_buffer(mut self, edges: usize) -> Self {
        self.cycle_buffer_edges = Some(edges);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.passes < 1 {
            return Err(Error::InvalidConfig("passes must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn buffer_threshold(&self, nodes: usize) -> usize {
        self.cycle_buffer_edges.unwrap_or(nodes).max(1)
    }
}

/// Hooks into a multipass run. All methods default to no-ops.
pub trait PassObserver<W> {
    fn before_cycle_removal(&mut self, _a: &Allocation<W>) {}
    fn after_cycle_removal(&mut self, _a: &Allocation<W>) {}
    /// Called after pass `pass` (1-based) has completed and its cycles
    /// have been cancelled.
    fn after_pass(&mut self, _pass: u32, _a: &Allocation<W>) {}
}

impl<W> PassObserver<W> for () {}

/// Runs `cfg.passes` replays of the stream in double precision.
pub fn run_multipass(s: &ArrivalStream, cfg: &PassConfig) -> Result<Allocation<f64>> {
    run_multipass_observed(s, cfg, &mut ())
}

/// Same as [`run_multipass`] in exact rational arithmetic.
pub fn run_multipass_exact(s: &ArrivalStream, cfg: &PassConfig) -> Result<Allocation<BigRational>> {
    let edges = s.graph().edge_count();
    if edges > EXACT_MODE_MAX_EDGES {
        return Err(Error::Refused(format!(
            "exact mode supports at most {EXACT_MODE_MAX_EDGES} edges, graph has {edges}"
        )));
    }
    run_multipass_observed(s, cfg, &mut ())
}

pub fn run_multipass_observed<W: Water, O: PassObserver<W>>(
    s: &ArrivalStream,
    cfg: &PassConfig,
    obs: &mut O,
) -> Result<Allocation<W>> {
    run_budgeted_inner(s, None, cfg, obs)
}

/// Multipass with integral left capacities: each arrival of `u` pours
/// `budgets[u]` units, one at a time, as if `u` had that many copies.
pub fn run_multipass_budgeted(s: &ArrivalStream, budgets: &[u32], cfg: &PassConfig) -> Result<Allocation<f64>> {
    if budgets.len() != s.graph().n_p() {
        return Err(Error::InvalidConfig(format!(
            "expected {} budgets, got {}",
            s.graph().n_p(),
            budgets.len()
        )));
    }
    run_budgeted_inner(s, Some(budgets), cfg, &mut ())
}

fn run_budgeted_inner<W: Water, O: PassObserver<W>>(
    s: &ArrivalStream,
    budgets: Option<&[u32]>,
    cfg: &PassConfig,
    obs: &mut O,
) -> Result<Allocation<W>> {
    cfg.validate()?;
    let g = s.graph();
    let mut a = Allocation::new(g.n_p(), g.n_q());
    for pass in 1..=cfg.passes {
        for (u, nbrs) in s.arrivals() {
            let copies = budgets.map_or(1, |b| b[u]);
            for _ in 0..copies {
                a.process_vertex_observed(u, nbrs, cfg, obs);
            }
        }
        a.remove_cycles_observed(obs);
        obs.after_pass(pass, &a);
    }
    Ok(a)
}
