//! Gap-existence instances and their text format:
//!
//! ```text
//! g <|A|> <|I|> <epsilon>
//! a <id> <budget> list <impression-id>*
//! a <id> <budget> interval <lo> <hi>
//! ```

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::oracle::{ActiveSet, AdjacencyOracle};
use crate::error::{Error, Result};
use crate::exact::budgeted_feasibility;
use crate::graph::BipartiteGraph;

/// Largest impression universe that may be materialized for exact checks.
pub const MATERIALIZE_MAX_IMPRESSIONS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Neighborhood {
    /// Sorted, duplicate-free impression ids.
    List(Vec<u64>),
    /// Every impression in `lo..=hi`.
    Interval { lo: u64, hi: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Advertiser {
    pub budget: u32,
    pub neighbors: Neighborhood,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapInstance {
    pub n_impressions: u64,
    pub epsilon: f64,
    pub advertisers: Vec<Advertiser>,
}

impl GapInstance {
    pub fn budgets(&self) -> Vec<u32> {
        self.advertisers.iter().map(|a| a.budget).collect()
    }

    pub fn sum_budgets(&self) -> u64 {
        self.advertisers.iter().map(|a| a.budget as u64).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_impressions < 1 {
            return Err(Error::InvalidConfig("impression universe is empty".into()));
        }
        for (id, a) in self.advertisers.iter().enumerate() {
            if a.budget < 1 {
                return Err(Error::InvalidConfig(format!(
                    "advertiser {id}: budget must be at least 1"
                )));
            }
            match &a.neighbors {
                Neighborhood::List(ids) => {
                    if ids.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::InvalidConfig(format!(
                            "advertiser {id}: list not sorted and unique"
                        )));
                    }
                    if ids.last().is_some_and(|&i| i >= self.n_impressions) {
                        return Err(Error::InvalidConfig(format!(
                            "advertiser {id}: impression out of range"
                        )));
                    }
                }
                Neighborhood::Interval { lo, hi } => {
                    if lo > hi || *hi >= self.n_impressions {
                        return Err(Error::InvalidConfig(format!(
                            "advertiser {id}: bad interval [{lo}, {hi}]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `floor((1 - eps) B_a)` for every advertiser.
    pub fn reduced_budgets(&self, eps: f64) -> Vec<u64> {
        reduced_budgets(&self.budgets(), eps)
    }

    /// Exact check for a matching that gives advertiser `a` exactly
    /// `demands[a]` impressions, each impression used at most once.
    /// Interval-only instances use earliest-deadline-first scheduling;
    /// anything else is materialized and solved by max-flow.
    pub fn complete_matching_exists(&self, demands: &[u64]) -> Result<bool> {
        let intervals: Option<Vec<(u64, u64)>> = self
            .advertisers
            .iter()
            .map(|a| match a.neighbors {
                Neighborhood::Interval { lo, hi } => Some((lo, hi)),
                Neighborhood::List(_) => None,
            })
            .collect();
        match intervals {
            Some(iv) => Ok(interval_feasibility(&iv, demands)),
            None => Ok(budgeted_feasibility(&self.to_graph()?, demands)),
        }
    }

    /// The explicit advertiser × impression graph.
    pub fn to_graph(&self) -> Result<BipartiteGraph> {
        if self.n_impressions > MATERIALIZE_MAX_IMPRESSIONS {
            return Err(Error::Refused(format!(
                "will not materialize {} impressions (limit {MATERIALIZE_MAX_IMPRESSIONS})",
                self.n_impressions
            )));
        }
        let adj = self
            .advertisers
            .iter()
            .map(|a| match &a.neighbors {
                Neighborhood::List(ids) => ids.iter().map(|&i| i as usize).collect(),
                Neighborhood::Interval { lo, hi } => (*lo as usize..=*hi as usize).collect(),
            })
            .collect();
        BipartiteGraph::new(self.n_impressions as usize, adj)
    }
}

pub(crate) fn reduced_budgets(budgets: &[u32], eps: f64) -> Vec<u64> {
    // the nudge keeps e.g. 0.8 * 5 from landing just under 4
    budgets
        .iter()
        .map(|&b| ((1.0 - eps) * b as f64 + 1e-9).floor() as u64)
        .collect()
}

/// Earliest-deadline-first assignment of unit impressions to intervals.
pub fn interval_feasibility(intervals: &[(u64, u64)], demands: &[u64]) -> bool {
    assert_eq!(intervals.len(), demands.len());
    let mut by_start: Vec<usize> = (0..intervals.len()).filter(|&a| demands[a] > 0).collect();
    by_start.sort_by_key(|&a| intervals[a].0);
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    let mut remaining = demands.to_vec();
    let mut next = 0;
    let mut x = 0u64;
    loop {
        if heap.is_empty() {
            match by_start.get(next) {
                Some(&a) => x = x.max(intervals[a].0),
                None => return true,
            }
        }
        while let Some(&a) = by_start.get(next) {
            if intervals[a].0 > x {
                break;
            }
            heap.push(Reverse((intervals[a].1, a)));
            next += 1;
        }
        let Reverse((hi, a)) = heap.pop().expect("heap refilled above");
        if hi < x {
            return false;
        }
        remaining[a] -= 1;
        if remaining[a] > 0 {
            heap.push(Reverse((hi, a)));
        }
        x += 1;
    }
}

impl AdjacencyOracle for GapInstance {
    fn list_neighbors(&self, advertiser: usize, set: &ActiveSet) -> Vec<u64> {
        match &self.advertisers[advertiser].neighbors {
            Neighborhood::Interval { lo, hi } => set.range(*lo, *hi).collect(),
            Neighborhood::List(ids) => {
                if ids.len() <= set.len() {
                    ids.iter().copied().filter(|&i| set.contains(i)).collect()
                } else {
                    set.iter().filter(|i| ids.binary_search(i).is_ok()).collect()
                }
            }
        }
    }

    fn new_neighbor(&self, advertiser: usize, set: &ActiveSet) -> Option<u64> {
        match &self.advertisers[advertiser].neighbors {
            Neighborhood::Interval { lo, hi } => {
                let mut candidate = *lo;
                for i in set.range(*lo, *hi) {
                    if i != candidate {
                        break;
                    }
                    candidate += 1;
                }
                (candidate <= *hi).then_some(candidate)
            }
            Neighborhood::List(ids) => ids.iter().copied().find(|&i| !set.contains(i)),
        }
    }
}

pub fn parse_gap_instance(text: &[u8]) -> Result<GapInstance> {
    let text = std::str::from_utf8(text).map_err(|e| Error::parse(0, format!("not ASCII: {e}")))?;
    let mut header: Option<(usize, u64, f64)> = None;
    let mut slots: Vec<Option<Advertiser>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        match (fields[0], header) {
            ("g", None) => {
                if fields.len() != 4 {
                    return Err(Error::parse(
                        line_no,
                        "malformed header: expected `g <|A|> <|I|> <epsilon>`",
                    ));
                }
                let n_a: usize = num(fields[1], line_no, "|A|")?;
                let n_i: u64 = num(fields[2], line_no, "|I|")?;
                let eps: f64 = num(fields[3], line_no, "epsilon")?;
                if n_i < 1 {
                    return Err(Error::parse(line_no, "|I| must be at least 1"));
                }
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(Error::parse(line_no, format!("epsilon {eps} outside (0, 1)")));
                }
                header = Some((n_a, n_i, eps));
                slots = vec![None; n_a];
            }
            ("g", Some(_)) => return Err(Error::parse(line_no, "duplicate header")),
            ("a", Some((n_a, n_i, _))) => {
                if fields.len() < 4 {
                    return Err(Error::parse(line_no, "expected `a <id> <budget> <oracle-spec>`"));
                }
                let id: usize = num(fields[1], line_no, "advertiser id")?;
                if id >= n_a {
                    return Err(Error::parse(line_no, format!("id out of range: advertiser {id}")));
                }
                if slots[id].is_some() {
                    return Err(Error::parse(line_no, format!("advertiser {id} defined twice")));
                }
                let budget: u32 = num(fields[2], line_no, "budget")?;
                if budget < 1 {
                    return Err(Error::parse(line_no, "budget must be at least 1"));
                }
                let neighbors = match fields[3] {
                    "list" => {
                        let mut ids = fields[4..]
                            .iter()
                            .map(|f| num::<u64>(f, line_no, "impression id"))
                            .collect::<Result<Vec<_>>>()?;
                        ids.sort_unstable();
                        if ids.windows(2).any(|w| w[0] == w[1]) {
                            return Err(Error::parse(line_no, "duplicate impression"));
                        }
                        if ids.last().is_some_and(|&i| i >= n_i) {
                            return Err(Error::parse(line_no, "id out of range: impression"));
                        }
                        Neighborhood::List(ids)
                    }
                    "interval" => {
                        if fields.len() != 6 {
                            return Err(Error::parse(line_no, "expected `interval <lo> <hi>`"));
                        }
                        let lo: u64 = num(fields[4], line_no, "lo")?;
                        let hi: u64 = num(fields[5], line_no, "hi")?;
                        if lo > hi || hi >= n_i {
                            return Err(Error::parse(line_no, format!("bad interval [{lo}, {hi}]")));
                        }
                        Neighborhood::Interval { lo, hi }
                    }
                    other => return Err(Error::parse(line_no, format!("unknown oracle spec {other:?}"))),
                };
                slots[id] = Some(Advertiser { budget, neighbors });
            }
            (_, None) => {
                return Err(Error::parse(
                    line_no,
                    "malformed header: expected `g <|A|> <|I|> <epsilon>`",
                ))
            }
            (other, Some(_)) => return Err(Error::parse(line_no, format!("unknown record type {other:?}"))),
        }
    }

    let (_, n_impressions, epsilon) = header.ok_or_else(|| Error::parse(last_line, "malformed header: missing"))?;
    let advertisers = slots
        .into_iter()
        .enumerate()
        .map(|(id, s)| s.ok_or_else(|| Error::parse(last_line, format!("advertiser {id} missing"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(GapInstance {
        n_impressions,
        epsilon,
        advertisers,
    })
}

fn num<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what} {field:?}")))
}

pub fn write_gap_instance(inst: &GapInstance) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "g {} {} {}",
        inst.advertisers.len(),
        inst.n_impressions,
        inst.epsilon
    );
    for (id, a) in inst.advertisers.iter().enumerate() {
        let _ = write!(out, "a {id} {}", a.budget);
        match &a.neighbors {
            Neighborhood::List(ids) => {
                out.push_str(" list");
                for i in ids {
                    let _ = write!(out, " {i}");
                }
            }
            Neighborhood::Interval { lo, hi } => {
                let _ = write!(out, " interval {lo} {hi}");
            }
        }
        out.push('\n');
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &[u8] = b"# two advertisers\ng 2 10 0.2\na 0 3 interval 0 2\na 1 2 list 9 4\n";

    #[test]
    fn parse_and_write() {
        let inst = parse_gap_instance(SAMPLE).unwrap();
        assert_eq!(inst.n_impressions, 10);
        assert_eq!(inst.epsilon, 0.2);
        assert_eq!(inst.advertisers[0].neighbors, Neighborhood::Interval { lo: 0, hi: 2 });
        assert_eq!(inst.advertisers[1].neighbors, Neighborhood::List(vec![4, 9]));
        let text = write_gap_instance(&inst);
        assert_eq!(text, b"g 2 10 0.2\na 0 3 interval 0 2\na 1 2 list 4 9\n");
        assert_eq!(parse_gap_instance(&text).unwrap(), inst);
    }

    #[test]
    fn parse_errors() {
        for (text, line) in [
            (&b"a 0 1 list\n"[..], 1),
            (b"g 1 5 0.2\na 0 0 list 1\n", 2),
            (b"g 1 5 0.2\na 0 1 interval 3 9\n", 2),
            (b"g 1 5 0.2\na 0 1 list 1 1\n", 2),
            (b"g 1 5 0.2\na 0 1 magic\n", 2),
            (b"g 2 5 0.2\na 0 1 list 1\n", 2),
            (b"g 1 5 1.5\n", 1),
        ] {
            match parse_gap_instance(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{}", String::from_utf8_lossy(text)),
                other => panic!("expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn interval_oracle() {
        let inst = parse_gap_instance(SAMPLE).unwrap();
        let mut s = ActiveSet::new();
        assert_eq!(inst.new_neighbor(0, &s), Some(0));
        s.insert(0);
        s.insert(1);
        s.insert(5);
        assert_eq!(inst.new_neighbor(0, &s), Some(2));
        assert_eq!(inst.list_neighbors(0, &s), vec![0, 1]);
        s.insert(2);
        assert_eq!(inst.new_neighbor(0, &s), None);
        assert_eq!(inst.list_neighbors(1, &s), Vec::<u64>::new());
        assert_eq!(inst.new_neighbor(1, &s), Some(4));
    }

    #[test]
    fn edf_matches_flow() {
        let inst =
            parse_gap_instance(b"g 3 6 0.2\na 0 2 interval 0 1\na 1 2 interval 1 3\na 2 2 interval 0 5\n").unwrap();
        for demands in [[2, 2, 2], [2, 3, 1], [1, 3, 2], [2, 2, 3]] {
            let g = inst.to_graph().unwrap();
            assert_eq!(
                inst.complete_matching_exists(&demands).unwrap(),
                budgeted_feasibility(&g, &demands),
                "{demands:?}"
            );
        }
    }

    #[test]
    fn reduced_budget_rounding() {
        assert_eq!(reduced_budgets(&[1, 2, 3, 5, 10], 0.2), vec![0, 1, 2, 4, 8]);
    }
}
