//! Semi-streaming bipartite matching by multipass fractional water-filling.
//!
//! Left vertices arrive in a stream together with their neighbor lists. On
//! every arrival the vertex pours one unit of water onto its least loaded
//! neighbors; after `k` passes the loads define a fractional matching whose
//! size is within `1 - e^{-k} k^{k-1} / (k-1)!` of the maximum matching.
//!
//! The crate is organized by capability:
//!
//! - [`graph`]: graphs, arrival streams, the stream text format.
//! - [`waterfill`]: the multipass engine and cycle cancellation.
//! - [`exact`]: Hopcroft-Karp, a brute-force oracle, rounding on the support
//!   and budgeted feasibility by max-flow.
//! - [`analysis`]: closed-form guarantees, level profiles, pass-count
//!   selection and canonical decompositions.
//! - [`gap`]: the gap-existence solver for lop-sided advertiser/impression
//!   graphs accessed through adjacency oracles.
//! - [`gen`]: seeded instance generators.
//! - [`harness`]: run reports and the commands behind the `streammatch`
//!   binary.
//!
//! Runnable walkthroughs live under `examples/`; start with
//! `cargo run --example multipass_ratio`.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod gap;
pub mod gen;
pub mod graph;
pub mod harness;
pub mod waterfill;

pub use error::{Error, Result};
pub use graph::{parse_stream, validate_matching, write_stream, ArrivalStream, BipartiteGraph, Matching, OrderPolicy};
pub use waterfill::{run_multipass, run_multipass_exact, Allocation, PassConfig};
