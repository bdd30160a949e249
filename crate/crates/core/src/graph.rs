//! Bipartite graphs, vertex-arrival streams and integral matchings.
//!
//! Left vertices (`P`) arrive in the stream together with their full
//! neighbor lists; right vertices (`Q`) are known up front. Both sides use
//! dense 0-based ids.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! p <n_p> <n_q>
//! v <left-id> <right-id>*
//! ```
//!
//! with one `v` line per left vertex, in arrival order.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    n_p: usize,
    n_q: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Builds a graph from per-left-vertex neighbor lists.
    ///
    /// Lists are sorted; duplicates and out-of-range ids are rejected.
    pub fn new(n_q: usize, mut adj: Vec<Vec<usize>>) -> Result<Self> {
        for (u, nbrs) in adj.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(&v) = nbrs.iter().find(|&&v| v >= n_q) {
                return Err(Error::InvalidConfig(format!(
                    "left vertex {u}: right id {v} out of range (n_q = {n_q})"
                )));
            }
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidConfig(format!("left vertex {u}: duplicate neighbor")));
            }
        }
        Ok(BipartiteGraph {
            n_p: adj.len(),
            n_q,
            adj,
        })
    }

    pub fn from_edges(n_p: usize, n_q: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n_p];
        for &(u, v) in edges {
            if u >= n_p {
                return Err(Error::InvalidConfig(format!("left id {u} out of range (n_p = {n_p})")));
            }
            adj[u].push(v);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        Self::new(n_q, adj)
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n_p && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().map(move |&v| (u, v)))
    }

    /// Left vertices with at least one neighbor.
    pub fn non_isolated_left(&self) -> usize {
        self.adj.iter().filter(|n| !n.is_empty()).count()
    }
}

/// How a stream orders its arrivals relative to left-vertex ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OrderPolicy {
    /// Keep the order the generator produced.
    #[default]
    Given,
    /// Seeded uniform shuffle.
    Random,
    Reverse,
}

impl std::str::FromStr for OrderPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "given" => Ok(OrderPolicy::Given),
            "random" => Ok(OrderPolicy::Random),
            "reverse" => Ok(OrderPolicy::Reverse),
            other => Err(Error::InvalidConfig(format!("unknown order policy {other:?}"))),
        }
    }
}

/// A replayable vertex-arrival stream: a graph plus the order in which its
/// left vertices arrive. Every pass replays the same order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalStream {
    graph: BipartiteGraph,
    order: Vec<usize>,
}

impl ArrivalStream {
    pub fn new(graph: BipartiteGraph, order: Vec<usize>) -> Result<Self> {
        if !is_permutation(&order, graph.n_p()) {
            return Err(Error::InvalidConfig(
                "arrival order is not a permutation of the left vertices".into(),
            ));
        }
        Ok(ArrivalStream { graph, order })
    }

    /// Arrivals in id order `0, 1, ..., n_p - 1`.
    pub fn in_id_order(graph: BipartiteGraph) -> Self {
        let order = (0..graph.n_p()).collect();
        ArrivalStream { graph, order }
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_graph(self) -> BipartiteGraph {
        self.graph
    }

    /// One pass worth of arrival events: `(left id, neighbors)`.
    pub fn arrivals(&self) -> impl Iterator<Item = (usize, &[usize])> + '_ {
        self.order.iter().map(|&u| (u, self.graph.neighbors(u)))
    }

    /// Reorders the arrivals. `Given` keeps the current order.
    pub fn reordered(mut self, policy: OrderPolicy, seed: u64) -> Self {
        match policy {
            OrderPolicy::Given => {}
            OrderPolicy::Reverse => self.order.reverse(),
            OrderPolicy::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                self.order.shuffle(&mut rng);
            }
        }
        self
    }
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &u in order {
        if u >= n || std::mem::replace(&mut seen[u], true) {
            return false;
        }
    }
    true
}

/// Parses the line-oriented stream format.
pub fn parse_stream(text: &[u8]) -> Result<ArrivalStream> {
    let text = std::str::from_utf8(text).map_err(|e| Error::parse(0, format!("not ASCII: {e}")))?;
    let mut header: Option<(usize, usize)> = None;
    let mut adj: Vec<Option<Vec<usize>>> = Vec::new();
    let mut order = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_ascii_whitespace();
        let tag = fields.next().unwrap_or_default();
        match (tag, header) {
            ("p", None) => {
                let n_p = parse_count(fields.next(), line_no, "n_p")?;
                let n_q = parse_count(fields.next(), line_no, "n_q")?;
                if fields.next().is_some() {
                    return Err(Error::parse(line_no, "malformed header: trailing fields"));
                }
                header = Some((n_p, n_q));
                adj = vec![None; n_p];
            }
            ("p", Some(_)) => return Err(Error::parse(line_no, "duplicate header")),
            ("v", Some((n_p, n_q))) => {
                let u = parse_count(fields.next(), line_no, "left id")?;
                if u >= n_p {
                    return Err(Error::parse(line_no, format!("id out of range: left id {u}")));
                }
                if adj[u].is_some() {
                    return Err(Error::parse(
                        line_no,
                        format!("non-permutation order: left id {u} arrives twice"),
                    ));
                }
                let mut nbrs = Vec::new();
                for f in fields {
                    let v = parse_count(Some(f), line_no, "right id")?;
                    if v >= n_q {
                        return Err(Error::parse(line_no, format!("id out of range: right id {v}")));
                    }
                    nbrs.push(v);
                }
                nbrs.sort_unstable();
                if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                    return Err(Error::parse(line_no, format!("duplicate neighbor {}", w[0])));
                }
                adj[u] = Some(nbrs);
                order.push(u);
            }
            (_, None) => return Err(Error::parse(line_no, "malformed header: expected `p <n_p> <n_q>`")),
            (other, Some(_)) => return Err(Error::parse(line_no, format!("unknown record type {other:?}"))),
        }
    }

    let (n_p, n_q) = header.ok_or_else(|| Error::parse(last_line, "malformed header: missing"))?;
    if order.len() != n_p {
        return Err(Error::parse(
            last_line,
            format!("non-permutation order: {} of {n_p} left vertices arrived", order.len()),
        ));
    }
    let adj = adj.into_iter().map(Option::unwrap_or_default).collect();
    Ok(ArrivalStream {
        graph: BipartiteGraph { n_p, n_q, adj },
        order,
    })
}

fn parse_count(field: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let field = field.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what} {field:?}")))
}

/// Canonical serialization: single spaces, LF endings, sorted neighbors.
pub fn write_stream(s: &ArrivalStream) -> Vec<u8> {
    let g = s.graph();
    let mut out = String::with_capacity(16 + 8 * g.edge_count());
    let _ = writeln!(out, "p {} {}", g.n_p(), g.n_q());
    for (u, nbrs) in s.arrivals() {
        let _ = write!(out, "v {u}");
        for v in nbrs {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// An integral matching as a list of `(left, right)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Matching { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// True iff every pair is an edge of `g` and no vertex is used twice.
pub fn validate_matching(g: &BipartiteGraph, m: &Matching) -> bool {
    let mut left = vec![false; g.n_p()];
    let mut right = vec![false; g.n_q()];
    m.pairs.iter().all(|&(u, v)| {
        g.has_edge(u, v) && !std::mem::replace(&mut left[u], true) && !std::mem::replace(&mut right[v], true)
    })
}
