use proptest::prelude::*;
use rand::Rng;

use streammatch::exact::{brute_force_max_matching, budgeted_feasibility, hopcroft_karp, FlowNetwork};
use streammatch::gen::rng;
use streammatch::{validate_matching, BipartiteGraph, Matching};

fn random_graph(rng: &mut impl Rng, max: usize) -> BipartiteGraph {
    let n_p = rng.gen_range(1..=max);
    let n_q = rng.gen_range(1..=max);
    let p = rng.gen_range(0.05..0.8);
    BipartiteGraph::new(
        n_q,
        (0..n_p)
            .map(|_| (0..n_q).filter(|_| rng.gen_bool(p)).collect())
            .collect(),
    )
    .unwrap()
}

#[test]
fn hopcroft_karp_agrees_with_brute_force() {
    let mut r = rng(1);
    for _ in 0..1000 {
        let g = random_graph(&mut r, 10);
        let m = hopcroft_karp(&g);
        assert!(validate_matching(&g, &m));
        assert_eq!(m.len(), brute_force_max_matching(&g).unwrap());
    }
}

#[test]
fn brute_force_refuses_wide_graphs() {
    let g = BipartiteGraph::new(1, vec![vec![0]; 11]).unwrap();
    assert!(brute_force_max_matching(&g).is_err());
}

/// Every candidate pair list on tiny graphs, checked against a direct
/// definition of a matching.
#[test]
fn validate_matching_exhaustive() {
    let mut r = rng(2);
    for _ in 0..50 {
        let g = random_graph(&mut r, 3);
        let all: Vec<(usize, usize)> = (0..g.n_p()).flat_map(|u| (0..g.n_q()).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << all.len()) {
            let pairs: Vec<_> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let lefts: std::collections::HashSet<_> = pairs.iter().map(|e| e.0).collect();
            let rights: std::collections::HashSet<_> = pairs.iter().map(|e| e.1).collect();
            let want = lefts.len() == pairs.len()
                && rights.len() == pairs.len()
                && pairs.iter().all(|&(u, v)| g.has_edge(u, v));
            assert_eq!(validate_matching(&g, &Matching::new(pairs)), want);
        }
    }
}

#[test]
fn dinic_small_network() {
    // classic 6-node example with max flow 23
    let mut n = FlowNetwork::new(6, 0, 5);
    for (a, b, c) in [
        (0, 1, 16),
        (0, 2, 13),
        (1, 2, 10),
        (2, 1, 4),
        (1, 3, 12),
        (3, 2, 9),
        (2, 4, 14),
        (4, 3, 7),
        (3, 5, 20),
        (4, 5, 4),
    ] {
        n.add_arc(a, b, c);
    }
    assert_eq!(n.max_flow(), 23);
}

#[test]
fn budgeted_feasibility_cases() {
    let g = BipartiteGraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
    assert!(budgeted_feasibility(&g, &[1, 2]));
    assert!(budgeted_feasibility(&g, &[2, 1]));
    assert!(!budgeted_feasibility(&g, &[2, 2]));
    assert!(budgeted_feasibility(&g, &[0, 0]));
}

proptest! {
    #[test]
    fn unit_budgets_match_hopcroft_karp(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 8);
        let all_matched = hopcroft_karp(&g).len() == g.n_p();
        prop_assert_eq!(budgeted_feasibility(&g, &vec![1; g.n_p()]), all_matched);
    }
}
