use proptest::prelude::*;

use streammatch::gen::{GenKind, GenSpec};
use streammatch::{parse_stream, write_stream, ArrivalStream, BipartiteGraph, Error, OrderPolicy};

fn parse_err(text: &str) -> (usize, String) {
    match parse_stream(text.as_bytes()) {
        Err(Error::Parse { line, message }) => (line, message),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn rejects_malformed_input() {
    assert!(parse_err("p 1 1\nv 0 1\n").1.contains("id out of range"));
    assert!(parse_err("p 1 2\nv 0 1 1\n").1.contains("duplicate neighbor"));
    assert!(parse_err("p 2 1\nv 0 0\nv 0 0\n").1.contains("non-permutation"));
    assert!(parse_err("p 2 1\nv 0 0\n").1.contains("non-permutation"));
    assert!(parse_err("v 0 0\n").1.contains("malformed header"));
    assert!(parse_err("p 1\n").1.contains("missing n_q"));
    assert!(parse_err("p 1 1\nx 0\n").1.contains("unknown record type"));
    assert_eq!(parse_err("p 1 1\n\n# c\nv 0 5\n").0, 4);
}

#[test]
fn comments_and_isolated_vertices() {
    let s = parse_stream(b"# header comment\np 2 3\nv 1\nv 0 2 0\n").unwrap();
    assert_eq!(s.order(), &[1, 0]);
    assert_eq!(s.graph().neighbors(0), &[0, 2]);
    assert!(s.graph().neighbors(1).is_empty());
    assert_eq!(write_stream(&s), b"p 2 3\nv 1\nv 0 0 2\n");
}

proptest! {
    #[test]
    fn round_trip(n_p in 1usize..15, n_q in 1usize..15, seed in any::<u64>(), edges in prop::collection::vec((0usize..15, 0usize..15), 0..60)) {
        let edges: Vec<_> = edges.into_iter().filter(|&(u, v)| u < n_p && v < n_q).collect();
        let mut uniq = edges.clone();
        uniq.sort_unstable();
        uniq.dedup();
        let g = BipartiteGraph::from_edges(n_p, n_q, &uniq).unwrap();
        let s = ArrivalStream::in_id_order(g).reordered(OrderPolicy::Random, seed);
        let text = write_stream(&s);
        let back = parse_stream(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(write_stream(&back), text);
    }

    #[test]
    fn generated_text_parses(n in 1usize..40, p in 0.0f64..0.5, seed in any::<u64>()) {
        let spec = GenSpec { kind: GenKind::Planted { n, extra_prob: p }, seed, order: OrderPolicy::Reverse };
        let g = spec.generate().unwrap();
        prop_assert_eq!(parse_stream(&g.to_text()).unwrap(), g.stream);
    }
}
