use std::collections::BTreeMap;

use super::forest::{DisjointSets, Side, SupportForest};
use super::water::{min_of, Water};
use super::{PassConfig, PassObserver};

/// Water-filling state: flows on support edges, right-vertex loads and
/// left-vertex capacities.
///
/// A left vertex's capacity is the number of times it has arrived; the
/// water it has dispensed equals its capacity unless it has no neighbors.
#[derive(Debug, Clone)]
pub struct Allocation<W = f64> {
    n_p: usize,
    /// Support edges of each left vertex with their (positive) flow.
    out: Vec<Vec<(usize, W)>>,
    load: Vec<W>,
    cap: Vec<u64>,
    withheld: W,
    forest: SupportForest,
}

/// Result of pouring water out of a left vertex.
#[derive(Debug, Clone, PartialEq)]
pub enum FillOutcome<W> {
    /// Every receiving neighbor ended at this common level.
    Level(W),
    /// The vertex had no neighbors; the water stays undispensed.
    Unallocatable,
}

impl<W: Water> Allocation<W> {
    pub fn new(n_p: usize, n_q: usize) -> Self {
        Allocation {
            n_p,
            out: vec![Vec::new(); n_p],
            load: vec![W::zero(); n_q],
            cap: vec![0; n_p],
            withheld: W::zero(),
            forest: SupportForest::new(n_p, n_q),
        }
    }

    /// Builds an allocation from explicit positive flows, e.g. to exercise
    /// cycle removal directly. Capacities are set to the rounded-up
    /// out-totals.
    pub fn from_flows(n_p: usize, n_q: usize, flows: &[(usize, usize, W)]) -> Self {
        let mut a = Self::new(n_p, n_q);
        for (u, v, f) in flows {
            if f.above_zero() {
                a.add_flow(*u, *v, f.clone());
            }
        }
        for u in 0..n_p {
            a.cap[u] = a.out_total(u).as_f64().ceil() as u64;
        }
        a
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn n_q(&self) -> usize {
        self.load.len()
    }

    pub fn load(&self, v: usize) -> &W {
        &self.load[v]
    }

    pub fn loads(&self) -> &[W] {
        &self.load
    }

    pub fn cap(&self, u: usize) -> u64 {
        self.cap[u]
    }

    pub fn flow(&self, u: usize, v: usize) -> W {
        self.out[u]
            .iter()
            .find(|(w, _)| *w == v)
            .map_or_else(W::zero, |(_, f)| f.clone())
    }

    /// Total water dispensed by `u` so far.
    pub fn out_total(&self, u: usize) -> W {
        self.out[u].iter().fold(W::zero(), |acc, (_, f)| acc + f.clone())
    }

    /// Support edges `(left, right, flow)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, &W)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, es)| es.iter().map(move |(v, f)| (u, *v, f)))
    }

    pub fn support_len(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Water that arrived at vertices with no neighbor to pour into.
    pub fn withheld(&self) -> &W {
        &self.withheld
    }

    /// Sum of all right-vertex loads.
    pub fn total_water(&self) -> W {
        self.load.iter().fold(W::zero(), |acc, l| acc + l.clone())
    }

    /// Adds a fresh right vertex at load zero and returns its id.
    pub fn add_right(&mut self) -> usize {
        self.load.push(W::zero());
        self.forest.push_right();
        self.load.len() - 1
    }

    pub(crate) fn bump_capacity(&mut self, u: usize) {
        self.cap[u] += 1;
    }

    pub(crate) fn withhold(&mut self, amount: W) {
        self.withheld = self.withheld.clone() + amount;
    }

    /// Adds `amount` of flow on `(u, v)`, registering a new support edge if
    /// needed.
    pub(crate) fn add_flow(&mut self, u: usize, v: usize, amount: W) {
        self.load[v] = self.load[v].clone() + amount.clone();
        match self.out[u].iter_mut().find(|(w, _)| *w == v) {
            Some((_, f)) => *f = f.clone() + amount,
            None => {
                self.out[u].push((v, amount));
                self.forest.insert(u, v);
            }
        }
    }

    /// Pours one unit out of `u` onto its least loaded neighbors.
    pub fn water_fill(&mut self, u: usize, nbrs: &[usize]) -> FillOutcome<W> {
        self.pour(u, nbrs, W::one())
    }

    /// Raises the least loaded of `nbrs` simultaneously until `amount` has
    /// left `u`. The common level `t` solves
    /// `sum over nbrs of max(0, t - load) = amount`.
    pub fn pour(&mut self, u: usize, nbrs: &[usize], amount: W) -> FillOutcome<W> {
        if nbrs.is_empty() {
            self.withhold(amount);
            return FillOutcome::Unallocatable;
        }
        let mut levels: Vec<(W, usize)> = nbrs.iter().map(|&v| (self.load[v].clone(), v)).collect();
        levels.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("loads are comparable").then(a.1.cmp(&b.1)));

        let mut prefix = W::zero();
        let mut level = W::zero();
        let mut filled = 0;
        for j in 0..levels.len() {
            prefix = prefix + levels[j].0.clone();
            let count = W::from_count(j as u64 + 1);
            let cand = (amount.clone() + prefix.clone()) / count;
            if j + 1 == levels.len() || cand <= levels[j + 1].0 {
                level = cand;
                filled = j + 1;
                break;
            }
        }
        for (l, v) in levels.into_iter().take(filled) {
            let delta = level.clone() - l;
            if delta.above_zero() {
                self.add_flow(u, v, delta);
            }
        }
        FillOutcome::Level(level)
    }

    /// One arrival: augment the capacity of `u`, pour one unit, and cancel
    /// cycles once enough new support edges have accumulated.
    pub fn process_vertex(&mut self, u: usize, nbrs: &[usize], cfg: &PassConfig) -> FillOutcome<W> {
        self.process_vertex_observed(u, nbrs, cfg, &mut ())
    }

    pub(crate) fn process_vertex_observed<O: PassObserver<W>>(
        &mut self,
        u: usize,
        nbrs: &[usize],
        cfg: &PassConfig,
        obs: &mut O,
    ) -> FillOutcome<W> {
        self.bump_capacity(u);
        let outcome = self.water_fill(u, nbrs);
        self.maybe_remove_cycles(cfg, obs);
        outcome
    }

    pub(crate) fn maybe_remove_cycles<O: PassObserver<W>>(&mut self, cfg: &PassConfig, obs: &mut O) {
        let threshold = cfg.buffer_threshold(self.n_p + self.n_q());
        if self.forest.fresh_edges() >= threshold {
            self.remove_cycles_observed(obs);
        }
    }

    pub(crate) fn remove_cycles_observed<O: PassObserver<W>>(&mut self, obs: &mut O) -> usize {
        obs.before_cycle_removal(self);
        let cancelled = self.remove_cycles();
        obs.after_cycle_removal(self);
        cancelled
    }

    /// Reroutes flow around every cycle in the support until it is a forest.
    /// Loads and left out-totals are unchanged. Returns the number of
    /// cycles cancelled.
    pub fn remove_cycles(&mut self) -> usize {
        let mut cancelled = 0;
        for (u, v) in self.forest.take_pending() {
            if !self.out[u].iter().any(|(w, _)| *w == v) {
                continue;
            }
            let rv = self.forest.right_node(v);
            let Some(path) = self.forest.path(rv, u) else {
                self.forest.link(u, rv);
                continue;
            };
            let mut cycle = Vec::with_capacity(path.len());
            cycle.push((u, v));
            for w in path.windows(2) {
                cycle.push(match (self.forest.node_side(w[0]), self.forest.node_side(w[1])) {
                    (Side::Left(a), Side::Right(b)) | (Side::Right(b), Side::Left(a)) => (a, b),
                    _ => unreachable!("support forest is bipartite"),
                });
            }
            let mut closing_alive = true;
            for (a, b) in self.cancel_cycle(&cycle) {
                let pos = self.out[a].iter().position(|(w, _)| *w == b).expect("support edge");
                self.out[a].swap_remove(pos);
                if (a, b) == (u, v) {
                    closing_alive = false;
                } else {
                    let rb = self.forest.right_node(b);
                    self.forest.cut(a, rb);
                }
            }
            if closing_alive {
                self.forest.link(u, rv);
            }
            cancelled += 1;
        }
        cancelled
    }

    /// Alternately adds and subtracts along an even cycle, choosing the
    /// orientation whose smallest subtracted flow is larger and pushing
    /// exactly that much. Returns the edges that reached zero.
    fn cancel_cycle(&mut self, cycle: &[(usize, usize)]) -> Vec<(usize, usize)> {
        debug_assert!(cycle.len().is_multiple_of(2) && cycle.len() >= 4);
        let flows: Vec<W> = cycle.iter().map(|&(a, b)| self.flow(a, b)).collect();
        let min_over = |parity: usize| {
            flows
                .iter()
                .skip(parity)
                .step_by(2)
                .fold(None::<W>, |m, f| Some(m.map_or_else(|| f.clone(), |m| min_of(&m, f))))
                .expect("cycle has edges of both parities")
        };
        let (odd_min, even_min) = (min_over(1), min_over(0));
        let (minus_parity, delta) = if odd_min >= even_min {
            (1, odd_min)
        } else {
            (0, even_min)
        };

        let mut zeroed = Vec::new();
        for (i, &(a, b)) in cycle.iter().enumerate() {
            let slot = self.out[a]
                .iter_mut()
                .find(|(w, _)| *w == b)
                .expect("cycle edge in support");
            if i % 2 == minus_parity {
                slot.1 = slot.1.clone() - delta.clone();
                if !slot.1.above_zero() {
                    slot.1 = W::zero();
                    zeroed.push((a, b));
                }
            } else {
                slot.1 = slot.1.clone() + delta.clone();
            }
        }
        zeroed
    }

    /// Independent acyclicity check over the current support.
    pub fn is_forest(&self) -> bool {
        let mut sets = DisjointSets::new(self.n_p + self.n_q());
        self.support().all(|(u, v, _)| sets.union(u, self.n_p + v))
    }

    /// Support edges that have not yet been checked for cycles.
    pub fn pending_cycle_edges(&self) -> usize {
        self.forest.pending_len()
    }

    /// Matching size implied by `k` passes: each right vertex with load `x`
    /// contributes `min(k, x) / k`.
    pub fn matching_value(&self, k: u32) -> W {
        let kw = W::from_count(k as u64);
        self.load.iter().fold(W::zero(), |acc, l| acc + min_of(l, &kw)) / kw
    }

    /// Scales flows by `1/k`, then shrinks the edges of every right vertex
    /// whose load exceeds `k` by `k / load`, giving a valid fractional
    /// matching of value [`Self::matching_value`].
    pub fn to_fractional_matching(&self, k: u32) -> BTreeMap<(usize, usize), W> {
        let kw = W::from_count(k as u64);
        self.support()
            .map(|(u, v, f)| {
                let l = &self.load[v];
                let x = if *l > kw {
                    f.clone() / l.clone()
                } else {
                    f.clone() / kw.clone()
                };
                ((u, v), x)
            })
            .collect()
    }
}
