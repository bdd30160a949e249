//! Bookkeeping that keeps the support of an allocation a forest.
//!
//! Nodes are left vertices `0..n_p` followed by right vertices. Support edges
//! either live in the forest or in the pending list (they closed a cycle
//! when they appeared). Only cycle cancellation deletes support edges, and a
//! deletion on a cycle never disconnects anything, so the union-find over
//! forest components stays valid except when a single cancellation zeroes
//! several forest edges at once; in that case path search fails and the
//! pending edge is simply linked.

#[derive(Debug, Clone, Default)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn push(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.size.push(1);
        id
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

const NONE: usize = usize::MAX;

/// The forest is stored as parent pointers. Linking re-roots one tree at
/// the new edge's endpoint, cutting clears one pointer, and a path query
/// walks both endpoints up to their lowest common ancestor, so every
/// operation costs the depth of the trees involved.
#[derive(Debug, Clone, Default)]
pub(crate) struct SupportForest {
    components: DisjointSets,
    parent: Vec<usize>,
    /// Support edges `(left, right)` not yet in the forest.
    pending: Vec<(usize, usize)>,
    /// Support edges created since the last cancellation sweep.
    fresh_edges: usize,
    n_p: usize,
    // ancestor marks for path queries
    stamp: Vec<u32>,
    epoch: u32,
}

impl SupportForest {
    pub(crate) fn new(n_p: usize, n_q: usize) -> Self {
        let n = n_p + n_q;
        SupportForest {
            components: DisjointSets::new(n),
            parent: vec![NONE; n],
            pending: Vec::new(),
            fresh_edges: 0,
            n_p,
            stamp: vec![0; n],
            epoch: 0,
        }
    }

    pub(crate) fn push_right(&mut self) {
        self.components.push();
        self.parent.push(NONE);
        self.stamp.push(0);
    }

    pub(crate) fn right_node(&self, v: usize) -> usize {
        self.n_p + v
    }

    pub(crate) fn node_side(&self, node: usize) -> Side {
        if node < self.n_p {
            Side::Left(node)
        } else {
            Side::Right(node - self.n_p)
        }
    }

    /// Registers a new support edge.
    pub(crate) fn insert(&mut self, u: usize, v: usize) {
        self.fresh_edges += 1;
        let rv = self.right_node(v);
        if self.components.union(u, rv) {
            self.link(u, rv);
        } else {
            self.pending.push((u, v));
        }
    }

    pub(crate) fn fresh_edges(&self) -> usize {
        self.fresh_edges
    }

    pub(crate) fn pending_len(&self) -> usize {
        self.pending.len()
    }

    pub(crate) fn take_pending(&mut self) -> Vec<(usize, usize)> {
        self.fresh_edges = 0;
        std::mem::take(&mut self.pending)
    }

    /// Makes `x` the root of its tree.
    fn evert(&mut self, x: usize) {
        let (mut prev, mut cur) = (NONE, x);
        while cur != NONE {
            let next = self.parent[cur];
            self.parent[cur] = prev;
            prev = cur;
            cur = next;
        }
    }

    /// Joins two different trees with the edge `a - b`.
    pub(crate) fn link(&mut self, a: usize, b: usize) {
        self.evert(a);
        self.parent[a] = b;
    }

    pub(crate) fn cut(&mut self, a: usize, b: usize) -> bool {
        if self.parent[a] == b {
            self.parent[a] = NONE;
        } else if self.parent[b] == a {
            self.parent[b] = NONE;
        } else {
            return false;
        }
        true
    }

    /// Node path `[from, ..., to]` inside the forest, if one exists.
    pub(crate) fn path(&mut self, from: usize, to: usize) -> Option<Vec<usize>> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        let mut x = from;
        while x != NONE {
            self.stamp[x] = epoch;
            x = self.parent[x];
        }
        let mut tail = Vec::new();
        let mut y = to;
        while y != NONE && self.stamp[y] != epoch {
            tail.push(y);
            y = self.parent[y];
        }
        if y == NONE {
            return None;
        }
        let lca = y;
        let mut path = Vec::new();
        let mut x = from;
        while x != lca {
            path.push(x);
            x = self.parent[x];
        }
        path.push(lca);
        path.extend(tail.into_iter().rev());
        Some(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Left(usize),
    Right(usize),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_detects_cycles() {
        let mut d = DisjointSets::new(4);
        assert!(d.union(0, 1));
        assert!(d.union(2, 3));
        assert!(d.union(1, 2));
        assert!(!d.union(0, 3));
        let id = d.push();
        assert!(d.union(id, 0));
    }

    #[test]
    fn forest_path_walk() {
        let mut f = SupportForest::new(2, 2);
        f.insert(0, 0);
        f.insert(0, 1);
        f.insert(1, 0);
        f.insert(1, 1);
        assert_eq!(f.pending_len(), 1);
        // left 1 to right 1 (node 3) via right 0, left 0
        assert_eq!(f.path(1, 3), Some(vec![1, 2, 0, 3]));
        assert_eq!(f.path(3, 1), Some(vec![3, 0, 2, 1]));
        assert!(f.cut(0, 2));
        assert!(!f.cut(0, 2));
        assert_eq!(f.path(1, 3), None);
        f.link(1, 3);
        assert_eq!(f.path(2, 0), Some(vec![2, 1, 3, 0]));
    }
}
