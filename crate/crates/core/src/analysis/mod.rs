//! Guarantees, level profiles and structural analysis.

mod closed_form;
mod decomposition;
mod profile;

pub use closed_form::{
    adaptive_simpson, choose_pass_count, eps_star, gamma_tail, guarantee, integrated_gamma_tail, loss_term, tail_bound,
};
pub use decomposition::{
    canonical_decomposition, verify_decomposition, Block, CanonicalDecomposition, DECOMPOSITION_MAX_LEFT,
};
pub use profile::{check_profile_bound, profile_bound_points, LevelProfile, ProfilePoint};
