//! Exact matching oracles used to measure and round the streaming results.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Matching};
use crate::waterfill::{Allocation, Water};

/// Largest left side the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_LEFT: usize = 10;

const UNMATCHED: usize = usize::MAX;

/// Maximum-cardinality matching by Hopcroft-Karp.
pub fn hopcroft_karp(g: &BipartiteGraph) -> Matching {
    let (n_p, n_q) = (g.n_p(), g.n_q());
    let mut match_left = vec![UNMATCHED; n_p];
    let mut match_right = vec![UNMATCHED; n_q];
    let mut dist = vec![usize::MAX; n_p];
    let mut queue = VecDeque::new();

    loop {
        // Layer free left vertices; `found` marks that some layer reaches a
        // free right vertex.
        queue.clear();
        for u in 0..n_p {
            if match_left[u] == UNMATCHED {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                let w = match_right[v];
                if w == UNMATCHED {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_p];
        for u in 0..n_p {
            if match_left[u] == UNMATCHED {
                augment(g, u, &mut match_left, &mut match_right, &mut dist, &mut it);
            }
        }
    }

    Matching::new(
        match_left
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNMATCHED)
            .map(|(u, &v)| (u, v))
            .collect(),
    )
}

// Iterative DFS along the BFS layering.
fn augment(
    g: &BipartiteGraph,
    root: usize,
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        let nbrs = g.neighbors(u);
        if it[u] == nbrs.len() {
            dist[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = nbrs[it[u]];
        let w = match_right[v];
        if w == UNMATCHED {
            // Flip the alternating path held on the stack.
            let mut v = v;
            while let Some(x) = stack.pop() {
                let prev = match_left[x];
                match_left[x] = v;
                match_right[v] = x;
                v = prev;
            }
            return true;
        }
        if dist[w] != usize::MAX && dist[w] == dist[u] + 1 {
            stack.push(w);
        } else {
            it[u] += 1;
        }
    }
    false
}

/// Maximum matching size by exhaustive search over left-vertex assignments.
pub fn brute_force_max_matching(g: &BipartiteGraph) -> Result<usize> {
    if g.n_p() > BRUTE_FORCE_MAX_LEFT {
        return Err(Error::Refused(format!(
            "brute force accepts at most {BRUTE_FORCE_MAX_LEFT} left vertices, got {}",
            g.n_p()
        )));
    }
    fn go(g: &BipartiteGraph, u: usize, used: &mut [bool]) -> usize {
        if u == g.n_p() {
            return 0;
        }
        let mut best = go(g, u + 1, used);
        for &v in g.neighbors(u) {
            if !used[v] {
                used[v] = true;
                best = best.max(1 + go(g, u + 1, used));
                used[v] = false;
            }
        }
        best
    }
    Ok(go(g, 0, &mut vec![false; g.n_q()]))
}

/// The subgraph of `g` made of the allocation's support edges.
pub fn support_graph<W: Water>(a: &Allocation<W>) -> BipartiteGraph {
    let edges: Vec<_> = a.support().map(|(u, v, _)| (u, v)).collect();
    BipartiteGraph::from_edges(a.n_p(), a.n_q(), &edges).expect("support ids are in range")
}

/// An integral matching inside the support of a `k`-pass allocation.
///
/// The support carries a fractional matching of value
/// `matching_value(k)`, so by bipartite integrality its maximum matching
/// is at least that large.
pub fn round_on_support<W: Water>(a: &Allocation<W>, _k: u32, g: &BipartiteGraph) -> Matching {
    let support = support_graph(a);
    debug_assert!(support.edges().all(|(u, v)| g.has_edge(u, v)));
    hopcroft_karp(&support)
}

/// A directed network with integer arc capacities, solved by Dinic's
/// algorithm.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    heads: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
    source: usize,
    sink: usize,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        FlowNetwork {
            heads: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
            source,
            sink,
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) {
        debug_assert!(to != self.source && from != self.sink);
        self.heads[from].push(self.to.len());
        self.to.push(to);
        self.cap.push(cap);
        self.heads[to].push(self.to.len());
        self.to.push(from);
        self.cap.push(0);
    }

    pub fn max_flow(&mut self) -> u64 {
        let n = self.heads.len();
        let mut total = 0;
        let mut level = vec![usize::MAX; n];
        loop {
            level.iter_mut().for_each(|l| *l = usize::MAX);
            level[self.source] = 0;
            let mut queue = VecDeque::from([self.source]);
            while let Some(x) = queue.pop_front() {
                for &e in &self.heads[x] {
                    let y = self.to[e];
                    if self.cap[e] > 0 && level[y] == usize::MAX {
                        level[y] = level[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            if level[self.sink] == usize::MAX {
                return total;
            }
            let mut it = vec![0usize; n];
            loop {
                let pushed = self.blocking_push(self.source, u64::MAX, &level, &mut it);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn blocking_push(&mut self, x: usize, limit: u64, level: &[usize], it: &mut [usize]) -> u64 {
        if x == self.sink {
            return limit;
        }
        while it[x] < self.heads[x].len() {
            let e = self.heads[x][it[x]];
            let y = self.to[e];
            if self.cap[e] > 0 && level[y] == level[x] + 1 {
                let pushed = self.blocking_push(y, limit.min(self.cap[e]), level, it);
                if pushed > 0 {
                    self.cap[e] -= pushed;
                    self.cap[e ^ 1] += pushed;
                    return pushed;
                }
            }
            it[x] += 1;
        }
        0
    }
}

/// True iff `g` has a matching that uses every left vertex `a` exactly
/// `budgets[a]` times and every right vertex at most once.
pub fn budgeted_feasibility(g: &BipartiteGraph, budgets: &[u64]) -> bool {
    assert_eq!(budgets.len(), g.n_p(), "one budget per left vertex");
    let (n_p, n_q) = (g.n_p(), g.n_q());
    let (source, sink) = (n_p + n_q, n_p + n_q + 1);
    let mut net = FlowNetwork::new(n_p + n_q + 2, source, sink);
    for (a, &b) in budgets.iter().enumerate() {
        if b > 0 {
            net.add_arc(source, a, b);
        }
    }
    for (a, i) in g.edges() {
        net.add_arc(a, n_p + i, 1);
    }
    for i in 0..n_q {
        net.add_arc(n_p + i, sink, 1);
    }
    net.max_flow() == budgets.iter().sum::<u64>()
}
