use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, HashSet};

/// The impressions a solver has materialized so far, with dense indices in
/// insertion order.
#[derive(Debug, Clone, Default)]
pub struct ActiveSet {
    index: BTreeMap<u64, usize>,
    ids: Vec<u64>,
}

impl ActiveSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(i: u64) -> Self {
        let mut s = Self::new();
        s.insert(i);
        s
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, i: u64) -> bool {
        self.index.contains_key(&i)
    }

    /// Dense index of impression `i`.
    pub fn dense(&self, i: u64) -> Option<usize> {
        self.index.get(&i).copied()
    }

    /// Impression id of dense index `d`.
    pub fn id(&self, d: usize) -> u64 {
        self.ids[d]
    }

    /// Adds `i` if absent and returns its dense index.
    pub fn insert(&mut self, i: u64) -> usize {
        let next = self.ids.len();
        let d = *self.index.entry(i).or_insert(next);
        if d == next {
            self.ids.push(i);
        }
        d
    }

    /// Members in increasing id order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.index.keys().copied()
    }

    /// Members within `lo..=hi`, in increasing order.
    pub fn range(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        self.index.range(lo..=hi).map(|(&i, _)| i)
    }
}

/// Access to an advertiser's neighborhood without enumerating the
/// impression universe.
pub trait AdjacencyOracle {
    /// The neighbors of `advertiser` that lie in `set`.
    fn list_neighbors(&self, advertiser: usize, set: &ActiveSet) -> Vec<u64>;

    /// Some neighbor of `advertiser` outside `set`, or `None` if every
    /// neighbor is already in `set`.
    fn new_neighbor(&self, advertiser: usize, set: &ActiveSet) -> Option<u64>;
}

impl<O: AdjacencyOracle + ?Sized> AdjacencyOracle for &O {
    fn list_neighbors(&self, advertiser: usize, set: &ActiveSet) -> Vec<u64> {
        (**self).list_neighbors(advertiser, set)
    }

    fn new_neighbor(&self, advertiser: usize, set: &ActiveSet) -> Option<u64> {
        (**self).new_neighbor(advertiser, set)
    }
}

/// Wraps an oracle and records every call and every impression it hands
/// out, so tests can check that a solver only touches what the oracle
/// revealed.
#[derive(Debug)]
pub struct CountingOracle<O> {
    inner: O,
    list_calls: Cell<u64>,
    new_calls: Cell<u64>,
    revealed: RefCell<HashSet<u64>>,
}

impl<O> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        CountingOracle {
            inner,
            list_calls: Cell::new(0),
            new_calls: Cell::new(0),
            revealed: RefCell::new(HashSet::new()),
        }
    }

    pub fn list_calls(&self) -> u64 {
        self.list_calls.get()
    }

    pub fn new_calls(&self) -> u64 {
        self.new_calls.get()
    }

    /// Impressions returned by `new_neighbor` so far.
    pub fn revealed(&self) -> HashSet<u64> {
        self.revealed.borrow().clone()
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: AdjacencyOracle> AdjacencyOracle for CountingOracle<O> {
    fn list_neighbors(&self, advertiser: usize, set: &ActiveSet) -> Vec<u64> {
        self.list_calls.set(self.list_calls.get() + 1);
        self.inner.list_neighbors(advertiser, set)
    }

    fn new_neighbor(&self, advertiser: usize, set: &ActiveSet) -> Option<u64> {
        self.new_calls.set(self.new_calls.get() + 1);
        let out = self.inner.new_neighbor(advertiser, set);
        if let Some(i) = out {
            self.revealed.borrow_mut().insert(i);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn active_set_indices() {
        let mut s = ActiveSet::new();
        assert_eq!(s.insert(40), 0);
        assert_eq!(s.insert(7), 1);
        assert_eq!(s.insert(40), 0);
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![7, 40]);
        assert_eq!(s.range(8, 100).collect::<Vec<_>>(), vec![40]);
        assert_eq!(s.id(1), 7);
        assert_eq!(s.dense(7), Some(1));
    }
}
