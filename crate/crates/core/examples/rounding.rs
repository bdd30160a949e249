//! Turning the fractional allocation into an integral matching. The
//! support is a forest, so a maximum matching on it is at least as large as
//! the fractional value rounded up.

use streammatch::exact::{hopcroft_karp, round_on_support, support_graph};
use streammatch::gen::gen_layered_adversarial;
use streammatch::{run_multipass, validate_matching, PassConfig};

fn main() -> streammatch::Result<()> {
    let g = gen_layered_adversarial(4, 25, 9)?;
    let graph = g.stream.graph();
    for k in [1, 2, 3] {
        let a = run_multipass(&g.stream, &PassConfig::new(k))?;
        let support = support_graph(&a);
        let m = round_on_support(&a, k, &support);
        assert!(validate_matching(graph, &m));
        println!(
            "k={k} support {} edges ({} vertices), fractional {:.3}, rounded {}, opt {}",
            a.support_len(),
            graph.n_p() + graph.n_q(),
            a.matching_value(k),
            m.len(),
            hopcroft_karp(graph).len()
        );
    }
    Ok(())
}
