//! Canonical decomposition of small bipartite graphs into blocks of uniform
//! vertex expansion.
//!
//! Blocks are found by repeatedly extracting, among the remaining left
//! vertices, the set `S` minimizing `|Gamma(S) ∩ Q_rem| / |S|` (largest `S`
//! on ties) and pairing it with those neighbors. Expansion ratios come out
//! strictly increasing.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Largest left side the exhaustive routines accept.
pub const DECOMPOSITION_MAX_LEFT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub index: i64,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// `|right| / |left|`; `None` for the trailing block of right vertices
    /// no left vertex reaches (unbounded expansion).
    pub alpha: Option<Ratio<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalDecomposition {
    pub blocks: Vec<Block>,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn or_into(&self, out: &mut Bits) {
        out.0.iter_mut().zip(&self.0).for_each(|(o, x)| *o |= x);
    }
    fn and_count(&self, mask: &Bits) -> usize {
        self.0
            .iter()
            .zip(&mask.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
    fn ones(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| self.get(i)).collect()
    }
}

fn neighbor_bits(g: &BipartiteGraph) -> Vec<Bits> {
    (0..g.n_p())
        .map(|u| {
            let mut b = Bits::zeros(g.n_q());
            g.neighbors(u).iter().for_each(|&v| b.set(v));
            b
        })
        .collect()
}

/// For every subset mask of `members`, calls `visit(mask, gamma)` with the
/// union of the members' neighborhoods. Subsets are visited in increasing
/// mask order, so `gamma` for `mask` extends the one for `mask & (mask-1)`.
fn for_each_subset(members: &[usize], nbrs: &[Bits], words: usize, mut visit: impl FnMut(u32, &Bits)) {
    let r = members.len();
    let mut gammas: Vec<Bits> = Vec::with_capacity(1 << r);
    gammas.push(Bits(vec![0; words]));
    for mask in 1u32..(1 << r) {
        let low = mask.trailing_zeros() as usize;
        let mut gamma = gammas[(mask & (mask - 1)) as usize].clone();
        nbrs[members[low]].or_into(&mut gamma);
        visit(mask, &gamma);
        gammas.push(gamma);
    }
}

/// (left, right, alpha) of one extracted block.
type Extracted = (Vec<usize>, Vec<usize>, Option<Ratio<usize>>);

/// Computes the canonical decomposition by brute-force minimum-ratio set
/// extraction. Refuses graphs with more than 20 left vertices.
pub fn canonical_decomposition(g: &BipartiteGraph) -> Result<CanonicalDecomposition> {
    if g.n_p() > DECOMPOSITION_MAX_LEFT {
        return Err(Error::Refused(format!(
            "canonical decomposition is exhaustive and accepts at most {DECOMPOSITION_MAX_LEFT} left vertices \
             (got {}); use verify_decomposition on a candidate partition instead",
            g.n_p()
        )));
    }
    let nbrs = neighbor_bits(g);
    let mut remaining_q = Bits::zeros(g.n_q());
    (0..g.n_q()).for_each(|v| remaining_q.set(v));
    let words = remaining_q.0.len();
    let mut remaining_p: Vec<usize> = (0..g.n_p()).collect();
    let mut extracted: Vec<Extracted> = Vec::new();

    while !remaining_p.is_empty() {
        // best = (|Gamma|, |S|, mask)
        let mut best: Option<(usize, usize, u32)> = None;
        for_each_subset(&remaining_p, &nbrs, words, |mask, gamma| {
            let t = gamma.and_count(&remaining_q);
            let s = mask.count_ones() as usize;
            let better = match best {
                None => true,
                Some((bt, bs, _)) => t * bs < bt * s || (t * bs == bt * s && s > bs),
            };
            if better {
                best = Some((t, s, mask));
            }
        });
        let (t, s, mask) = best.expect("remaining side is nonempty");
        let left: Vec<usize> = (0..remaining_p.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| remaining_p[i])
            .collect();
        let mut gamma = Bits::zeros(g.n_q());
        left.iter().for_each(|&u| nbrs[u].or_into(&mut gamma));
        let right: Vec<usize> = gamma
            .ones(g.n_q())
            .into_iter()
            .filter(|&v| remaining_q.get(v))
            .collect();
        debug_assert_eq!(right.len(), t);
        for &v in &right {
            remaining_q.0[v / 64] &= !(1 << (v % 64));
        }
        remaining_p.retain(|u| !left.contains(u));
        extracted.push((left, right, Some(Ratio::new(t, s))));
    }
    let leftover = remaining_q.ones(g.n_q());
    if !leftover.is_empty() {
        extracted.push((Vec::new(), leftover, None));
    }

    let one = Ratio::from_integer(1);
    let at_most_one = extracted.iter().filter(|(_, _, a)| a.is_some_and(|a| a <= one)).count() as i64;
    let blocks = extracted
        .into_iter()
        .enumerate()
        .map(|(pos, (left, right, alpha))| Block {
            index: pos as i64 - at_most_one + 1,
            left,
            right,
            alpha,
        })
        .collect();
    Ok(CanonicalDecomposition { blocks })
}

/// Checks a candidate decomposition exactly: blocks partition both sides,
/// indices respect the `alpha <= 1` / `alpha > 1` split, lower blocks only
/// reach lower right sets (property 1), every subset of a block expands by
/// at least its alpha inside the block (property 2) and `|T| = alpha |S|`
/// (property 3).
pub fn verify_decomposition(g: &BipartiteGraph, d: &CanonicalDecomposition) -> Result<bool> {
    if let Some(b) = d.blocks.iter().find(|b| b.left.len() > DECOMPOSITION_MAX_LEFT) {
        return Err(Error::Refused(format!(
            "block {} has {} left vertices; subset enumeration accepts at most {DECOMPOSITION_MAX_LEFT}",
            b.index,
            b.left.len()
        )));
    }
    let mut seen_p = vec![false; g.n_p()];
    let mut seen_q = vec![false; g.n_q()];
    for b in &d.blocks {
        for &u in &b.left {
            if u >= g.n_p() || std::mem::replace(&mut seen_p[u], true) {
                return Ok(false);
            }
        }
        for &v in &b.right {
            if v >= g.n_q() || std::mem::replace(&mut seen_q[v], true) {
                return Ok(false);
            }
        }
    }
    if !seen_p.iter().chain(&seen_q).all(|&s| s) {
        return Ok(false);
    }

    let mut blocks: Vec<&Block> = d.blocks.iter().collect();
    blocks.sort_by_key(|b| b.index);
    if blocks.windows(2).any(|w| w[0].index == w[1].index) {
        return Ok(false);
    }
    let one = Ratio::from_integer(1);
    for b in &blocks {
        let ok = match b.alpha {
            // unbounded expansion: only right vertices, and only above the split
            None => b.left.is_empty() && b.index > 0,
            Some(a) => {
                // property 3
                !b.left.is_empty()
                    && b.right.len() * *a.denom() == *a.numer() * b.left.len()
                    && ((b.index <= 0) == (a <= one))
            }
        };
        if !ok {
            return Ok(false);
        }
    }

    // property 1
    let mut lower_right = vec![false; g.n_q()];
    let mut lower_left = Vec::new();
    for b in &blocks {
        b.right.iter().for_each(|&v| lower_right[v] = true);
        lower_left.extend_from_slice(&b.left);
        if lower_left
            .iter()
            .any(|&u| g.neighbors(u).iter().any(|&v| !lower_right[v]))
        {
            return Ok(false);
        }
    }

    // property 2
    let nbrs = neighbor_bits(g);
    for b in &blocks {
        let Some(alpha) = b.alpha else { continue };
        let mut block_right = Bits::zeros(g.n_q());
        b.right.iter().for_each(|&v| block_right.set(v));
        let words = block_right.0.len();
        let mut ok = true;
        for_each_subset(&b.left, &nbrs, words, |mask, gamma| {
            let reach = gamma.and_count(&block_right);
            let size = mask.count_ones() as usize;
            if reach * *alpha.denom() < *alpha.numer() * size {
                ok = false;
            }
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n_p: usize, n_q: usize, edges: &[(usize, usize)]) -> BipartiteGraph {
        BipartiteGraph::from_edges(n_p, n_q, edges).unwrap()
    }

    #[test]
    fn perfect_matching_is_one_block() {
        let g = graph(3, 3, &[(0, 0), (1, 1), (2, 2)]);
        let d = canonical_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].alpha, Some(Ratio::from_integer(1)));
        assert_eq!(d.blocks[0].index, 0);
        assert!(verify_decomposition(&g, &d).unwrap());
    }

    #[test]
    fn shared_right_vertex_gives_half() {
        let g = graph(2, 1, &[(0, 0), (1, 0)]);
        let d = canonical_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].left, vec![0, 1]);
        assert_eq!(d.blocks[0].right, vec![0]);
        assert_eq!(d.blocks[0].alpha, Some(Ratio::new(1, 2)));
        assert!(verify_decomposition(&g, &d).unwrap());
    }

    #[test]
    fn single_left_vertex_expands_by_two() {
        let g = graph(1, 2, &[(0, 0), (0, 1)]);
        let d = canonical_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].alpha, Some(Ratio::from_integer(2)));
        assert_eq!(d.blocks[0].index, 1);
        assert!(verify_decomposition(&g, &d).unwrap());
    }

    fn two_block_graph() -> BipartiteGraph {
        // u0, u1 share v0 (alpha 1/2); u2 reaches v0, v1, v2 (alpha 2 on {v1, v2})
        graph(3, 3, &[(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)])
    }

    #[test]
    fn tampering_is_detected() {
        let g = two_block_graph();
        let d = canonical_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert!(verify_decomposition(&g, &d).unwrap());

        let mut swapped = d.clone();
        let a0 = swapped.blocks[0].alpha;
        swapped.blocks[0].alpha = swapped.blocks[1].alpha;
        swapped.blocks[1].alpha = a0;
        assert!(!verify_decomposition(&g, &swapped).unwrap());

        let mut merged = d.clone();
        let b1 = merged.blocks.pop().unwrap();
        merged.blocks[0].left.extend(b1.left);
        merged.blocks[0].right.extend(b1.right);
        assert!(!verify_decomposition(&g, &merged).unwrap());

        let mut reversed = d.clone();
        reversed.blocks[0].index = 5;
        reversed.blocks[0].alpha = Some(Ratio::from_integer(2));
        assert!(!verify_decomposition(&g, &reversed).unwrap());
    }

    #[test]
    fn isolated_vertices_on_both_sides() {
        let g = graph(2, 3, &[(1, 0)]);
        let d = canonical_decomposition(&g).unwrap();
        assert_eq!(d.blocks[0].left, vec![0]);
        assert_eq!(d.blocks[0].alpha, Some(Ratio::from_integer(0)));
        assert_eq!(d.blocks.last().unwrap().alpha, None);
        assert!(verify_decomposition(&g, &d).unwrap());
    }

    #[test]
    fn refuses_large_graphs() {
        let g = graph(21, 1, &[]);
        assert!(matches!(canonical_decomposition(&g), Err(Error::Refused(_))));
    }
}
