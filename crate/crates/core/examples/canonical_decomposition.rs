//! Canonical decomposition of a small bipartite graph into blocks of
//! increasing expansion.

use streammatch::analysis::{canonical_decomposition, verify_decomposition};
use streammatch::BipartiteGraph;

fn main() -> streammatch::Result<()> {
    // two left vertices crowd one right vertex, the rest expand freely
    let g = BipartiteGraph::from_edges(4, 5, &[(0, 0), (1, 0), (2, 1), (2, 2), (3, 2), (3, 3), (3, 4)])?;
    let d = canonical_decomposition(&g)?;
    for b in &d.blocks {
        let alpha = b.alpha.map_or("inf".to_string(), |a| a.to_string());
        println!(
            "block {:>2}: left {:?} right {:?} alpha {alpha}",
            b.index, b.left, b.right
        );
    }
    println!("verified: {}", verify_decomposition(&g, &d)?);
    Ok(())
}
