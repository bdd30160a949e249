use std::time::Instant;

use serde::Serialize;

use super::instance::{reduced_budgets, GapInstance};
use super::oracle::{ActiveSet, AdjacencyOracle};
use crate::analysis::choose_pass_count;
use crate::error::{Error, Result};
use crate::exact::budgeted_feasibility;
use crate::graph::BipartiteGraph;
use crate::waterfill::{Allocation, PassConfig};

/// Solver state over advertiser copies (left) and materialized impressions
/// (right, dense indices into the active set).
#[derive(Debug, Clone)]
pub struct GapState {
    alloc: Allocation<f64>,
    active: ActiveSet,
    copy_owner: Vec<usize>,
    peak_active: usize,
    list_calls: u64,
    new_calls: u64,
}

impl GapState {
    /// One copy per unit of budget; copies of an advertiser are contiguous.
    pub fn new(budgets: &[u32]) -> Self {
        let copy_owner: Vec<usize> = budgets
            .iter()
            .enumerate()
            .flat_map(|(a, &b)| std::iter::repeat_n(a, b as usize))
            .collect();
        GapState {
            alloc: Allocation::new(copy_owner.len(), 0),
            active: ActiveSet::new(),
            copy_owner,
            peak_active: 0,
            list_calls: 0,
            new_calls: 0,
        }
    }

    pub fn active(&self) -> &ActiveSet {
        &self.active
    }

    pub fn peak_active(&self) -> usize {
        self.peak_active
    }

    pub fn copies(&self) -> usize {
        self.copy_owner.len()
    }

    pub fn owner(&self, copy: usize) -> usize {
        self.copy_owner[copy]
    }

    /// Water level of impression `i` (zero if never materialized).
    pub fn level(&self, i: u64) -> f64 {
        self.active.dense(i).map_or(0.0, |d| *self.alloc.load(d))
    }

    pub fn allocation(&self) -> &Allocation<f64> {
        &self.alloc
    }

    pub fn total_water(&self) -> f64 {
        self.alloc.total_water()
    }

    pub fn withheld(&self) -> f64 {
        *self.alloc.withheld()
    }

    /// Impressions holding at least `threshold` water.
    pub fn count_at_least(&self, threshold: f64) -> usize {
        self.alloc.loads().iter().filter(|&&l| l >= threshold).count()
    }

    pub fn oracle_calls(&self) -> (u64, u64) {
        (self.list_calls, self.new_calls)
    }

    /// Support as an advertiser × active-impression graph (copies merged).
    pub fn support_graph(&self, n_advertisers: usize) -> BipartiteGraph {
        let edges: Vec<(usize, usize)> = self.alloc.support().map(|(c, d, _)| (self.copy_owner[c], d)).collect();
        BipartiteGraph::from_edges(n_advertisers, self.active.len(), &edges).expect("support ids are in range")
    }

    fn materialize(&mut self, i: u64) -> usize {
        let d = self.active.insert(i);
        if d == self.alloc.n_q() {
            self.alloc.add_right();
        }
        self.peak_active = self.peak_active.max(self.active.len());
        d
    }
}

/// One arrival of an advertiser copy carrying one unit of water:
///
/// 1. raise every materialized neighbor below `(eps/4) k` up to that level,
///    lowest first, stopping early if the unit runs out;
/// 2. ask the oracle once for a neighbor outside the active set and
///    materialize it;
/// 3. water-fill what is left over the materialized neighbors;
/// 4. cancel cycles once enough new support edges have accumulated.
pub fn process_advertiser<O: AdjacencyOracle>(
    st: &mut GapState,
    copy: usize,
    eps: f64,
    k: u32,
    oracle: &O,
) -> Result<()> {
    let cfg = PassConfig::new(k);
    process_inner(st, copy, eps, k, oracle, &cfg)
}

fn process_inner<O: AdjacencyOracle>(
    st: &mut GapState,
    copy: usize,
    eps: f64,
    k: u32,
    oracle: &O,
    cfg: &PassConfig,
) -> Result<()> {
    let advertiser = st.copy_owner[copy];
    let threshold = eps / 4.0 * k as f64;
    st.alloc.bump_capacity(copy);
    let mut budget = 1.0;

    st.list_calls += 1;
    let listed = oracle.list_neighbors(advertiser, &st.active);
    let mut nbrs = Vec::with_capacity(listed.len() + 1);
    for i in listed {
        let d = st.active.dense(i).ok_or_else(|| Error::OracleViolation {
            call: "LIST-NEIGHBORS",
            advertiser,
            message: format!("impression {i} is not in the active set"),
        })?;
        nbrs.push(d);
    }
    nbrs.sort_unstable();
    if nbrs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::OracleViolation {
            call: "LIST-NEIGHBORS",
            advertiser,
            message: "duplicate impression".into(),
        });
    }

    let mut low: Vec<usize> = nbrs
        .iter()
        .copied()
        .filter(|&d| *st.alloc.load(d) < threshold)
        .collect();
    low.sort_by(|&a, &b| st.alloc.load(a).total_cmp(st.alloc.load(b)).then(a.cmp(&b)));
    for d in low {
        let give = (threshold - *st.alloc.load(d)).min(budget);
        st.alloc.add_flow(copy, d, give);
        budget -= give;
        if budget <= 0.0 {
            break;
        }
    }

    if budget > 0.0 {
        st.new_calls += 1;
        if let Some(i) = oracle.new_neighbor(advertiser, &st.active) {
            if st.active.contains(i) {
                return Err(Error::OracleViolation {
                    call: "NEW-NEIGHBOR",
                    advertiser,
                    message: format!("impression {i} is already active"),
                });
            }
            st.list_calls += 1;
            if oracle.list_neighbors(advertiser, &ActiveSet::singleton(i)) != [i] {
                return Err(Error::OracleViolation {
                    call: "NEW-NEIGHBOR",
                    advertiser,
                    message: format!("impression {i} is not a neighbor"),
                });
            }
            nbrs.push(st.materialize(i));
        }
        st.alloc.pour(copy, &nbrs, budget);
    }

    st.alloc.maybe_remove_cycles(cfg, &mut ());
    Ok(())
}

/// Runs `k` passes over the advertiser copies. `on_pass` sees the state
/// after every pass (1-based).
pub fn run_gap_passes_with<O: AdjacencyOracle>(
    budgets: &[u32],
    oracle: &O,
    eps: f64,
    k: u32,
    mut on_pass: impl FnMut(u32, &GapState),
) -> Result<GapState> {
    check_eps(eps)?;
    if k < 1 {
        return Err(Error::InvalidConfig("passes must be at least 1".into()));
    }
    let mut st = GapState::new(budgets);
    let cfg = PassConfig::new(k);
    for pass in 1..=k {
        for copy in 0..st.copies() {
            process_inner(&mut st, copy, eps, k, oracle, &cfg)?;
        }
        st.alloc.remove_cycles();
        on_pass(pass, &st);
    }
    Ok(st)
}

pub fn run_gap_passes(inst: &GapInstance, eps: f64, k: u32) -> Result<GapState> {
    run_gap_passes_with(&inst.budgets(), inst, eps, k, |_, _| {})
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("epsilon {eps} must lie in (0, 1/2)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Yes => "YES",
            Decision::No => "NO",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapOutcome {
    pub decision: Decision,
    pub passes: u32,
    pub epsilon: f64,
    pub peak_active_set: usize,
    pub support_edges: usize,
    pub total_water: f64,
    pub withheld_water: f64,
    pub sum_budgets: u64,
    pub reduced_budget_total: u64,
    pub list_neighbor_calls: u64,
    pub new_neighbor_calls: u64,
    pub pass_wall_time_ms: Vec<f64>,
}

/// Chooses `k`, runs the discretized water-filling and answers YES iff the
/// support admits a matching with budgets `floor((1 - eps) B_a)`.
pub fn gap_decide_with<O: AdjacencyOracle>(
    budgets: &[u32],
    n_impressions: u64,
    oracle: &O,
    eps: f64,
) -> Result<GapOutcome> {
    check_eps(eps)?;
    let sum_budgets: u64 = budgets.iter().map(|&b| b as u64).sum();
    let k = choose_pass_count(eps, n_impressions, sum_budgets.max(1));
    let mut pass_wall_time_ms = Vec::with_capacity(k as usize);
    let mut last = Instant::now();
    let st = run_gap_passes_with(budgets, oracle, eps, k, |_, _| {
        pass_wall_time_ms.push(last.elapsed().as_secs_f64() * 1e3);
        last = Instant::now();
    })?;
    let support = st.support_graph(budgets.len());
    let reduced = reduced_budgets(budgets, eps);
    let decision = if budgeted_feasibility(&support, &reduced) {
        Decision::Yes
    } else {
        Decision::No
    };
    let (list_neighbor_calls, new_neighbor_calls) = st.oracle_calls();
    Ok(GapOutcome {
        decision,
        passes: k,
        epsilon: eps,
        peak_active_set: st.peak_active(),
        support_edges: st.allocation().support_len(),
        total_water: st.total_water(),
        withheld_water: st.withheld(),
        sum_budgets,
        reduced_budget_total: reduced.iter().sum(),
        list_neighbor_calls,
        new_neighbor_calls,
        pass_wall_time_ms,
    })
}

pub fn gap_decide(inst: &GapInstance, eps: f64) -> Result<GapOutcome> {
    inst.validate()?;
    gap_decide_with(&inst.budgets(), inst.n_impressions, inst, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::instance::parse_gap_instance;

    fn inst(text: &str) -> GapInstance {
        parse_gap_instance(text.as_bytes()).unwrap()
    }

    #[test]
    fn first_arrival_materializes_one_neighbor() {
        let g = inst("g 1 2 0.2\na 0 1 list 0 1\n");
        let mut st = GapState::new(&g.budgets());
        process_advertiser(&mut st, 0, 0.2, 10, &g).unwrap();
        assert_eq!(st.active().len(), 1);
        assert_eq!(st.level(0), 1.0);
        assert_eq!(st.level(1), 0.0);
    }

    #[test]
    fn low_neighbor_is_raised_first() {
        // eps = 0.2, k = 10: threshold 0.5. Impression 0 sits at 0.1.
        let g = inst("g 2 3 0.2\na 0 1 list 0 1\na 1 1 list 0\n");
        let mut st = GapState::new(&[1, 1]);
        let d = st.materialize(0);
        st.alloc.bump_capacity(1);
        st.alloc.add_flow(1, d, 0.1);
        process_advertiser(&mut st, 0, 0.2, 10, &g).unwrap();
        // 0.4 raises impression 0 to 0.5, the remaining 0.6 is filled over {0 at 0.5, 1 at 0}: (t - 0.5) + t = 0.6
        assert!((st.level(1) - 0.55).abs() < 1e-12);
        assert!((st.level(0) - 0.55).abs() < 1e-12);
        assert!((st.total_water() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn exhausted_oracle_fills_existing() {
        let g = inst("g 1 2 0.2\na 0 1 list 0 1\n");
        let mut st = GapState::new(&[1]);
        for i in [0, 1] {
            st.materialize(i);
        }
        st.alloc.bump_capacity(0);
        st.alloc.add_flow(0, 0, 3.0);
        st.alloc.add_flow(0, 1, 3.0);
        process_advertiser(&mut st, 0, 0.2, 10, &g).unwrap();
        assert_eq!(st.active().len(), 2);
        assert!((st.level(0) - 3.5).abs() < 1e-12 && (st.level(1) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn single_advertiser_three_passes() {
        let g = inst("g 1 1 0.2\na 0 1 list 0\n");
        let st = run_gap_passes(&g, 0.2, 3).unwrap();
        assert_eq!(st.level(0), 3.0);
    }

    #[test]
    fn disjoint_stars_answer_yes() {
        let g = inst("g 2 5 0.2\na 0 2 list 0 1\na 1 3 interval 2 4\n");
        assert_eq!(gap_decide(&g, 0.2).unwrap().decision, Decision::Yes);
    }

    #[test]
    fn counting_bound_answers_no() {
        // floor(0.8 * 3) = 2 per advertiser, 4 > 2 reachable impressions
        let g = inst("g 2 100 0.2\na 0 3 interval 0 1\na 1 3 interval 0 1\n");
        assert_eq!(gap_decide(&g, 0.2).unwrap().decision, Decision::No);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let g = inst("g 1 1 0.2\na 0 1 list 0\n");
        assert!(matches!(gap_decide(&g, 0.6), Err(Error::InvalidConfig(_))));
        assert!(matches!(gap_decide(&g, 0.0), Err(Error::InvalidConfig(_))));
    }

    struct Liar;
    impl AdjacencyOracle for Liar {
        fn list_neighbors(&self, _: usize, _: &ActiveSet) -> Vec<u64> {
            vec![]
        }
        fn new_neighbor(&self, _: usize, _: &ActiveSet) -> Option<u64> {
            Some(7)
        }
    }

    #[test]
    fn oracle_violation_is_reported() {
        let mut st = GapState::new(&[1]);
        let err = process_advertiser(&mut st, 0, 0.2, 4, &Liar).unwrap_err();
        assert!(
            matches!(
                err,
                Error::OracleViolation {
                    call: "NEW-NEIGHBOR",
                    ..
                }
            ),
            "{err}"
        );
    }
}
