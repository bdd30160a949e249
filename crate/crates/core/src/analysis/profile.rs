use serde::Serialize;

use super::closed_form::{adaptive_simpson, gamma_tail};
use crate::waterfill::{Allocation, Water};

/// Right-vertex loads after `k` passes, kept sorted so that
/// `b(x) = #{v : load_v >= x}` and its integrals are exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfile {
    loads: Vec<f64>,
    k: u32,
}

impl LevelProfile {
    pub fn new(mut loads: Vec<f64>, k: u32) -> Self {
        loads.sort_by(f64::total_cmp);
        LevelProfile { loads, k }
    }

    pub fn from_allocation<W: Water>(a: &Allocation<W>, k: u32) -> Self {
        Self::new(a.loads().iter().map(Water::as_f64).collect(), k)
    }

    pub fn loads(&self) -> &[f64] {
        &self.loads
    }

    pub fn passes(&self) -> u32 {
        self.k
    }

    /// `b(x)`.
    pub fn count_at_least(&self, x: f64) -> usize {
        self.loads.len() - self.loads.partition_point(|&l| l < x)
    }

    /// `integral_0^x b(s) ds = sum_v min(load_v, x)`.
    pub fn integral_to(&self, x: f64) -> f64 {
        self.loads.iter().map(|&l| l.min(x)).sum()
    }

    pub fn total(&self) -> f64 {
        self.loads.iter().sum()
    }

    /// 50 evenly spaced points on `[0, 3k]` plus every distinct load.
    pub fn default_grid(&self) -> Vec<f64> {
        let top = 3.0 * self.k as f64;
        let mut grid: Vec<f64> = (0..50).map(|i| top * i as f64 / 49.0).collect();
        grid.extend(self.loads.iter().copied());
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub x: f64,
    /// `integral_0^x b`.
    pub profile_mass: f64,
    /// `m_opt * integral_0^x F^k`.
    pub bound: f64,
    pub holds: bool,
}

/// Evaluates `integral_0^x b >= m_opt * integral_0^x F^k - 1e-6 m_opt` at
/// every grid point. The Gamma-tail integral is accumulated piecewise
/// between sorted grid points by adaptive quadrature.
pub fn profile_bound_points(p: &LevelProfile, m_opt: usize, grid: &[f64]) -> Vec<ProfilePoint> {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let m = m_opt as f64;
    let slack = 1e-6 * m;
    let mut points = vec![None; grid.len()];
    let (mut prev_x, mut acc) = (0.0, 0.0);
    for idx in order {
        let x = grid[idx];
        assert!(x >= 0.0, "grid points must be nonnegative");
        acc += adaptive_simpson(|s| gamma_tail(p.k, s), prev_x, x, 1e-9);
        prev_x = x;
        let profile_mass = p.integral_to(x);
        let bound = m * acc;
        points[idx] = Some(ProfilePoint {
            x,
            profile_mass,
            bound,
            holds: profile_mass >= bound - slack,
        });
    }
    points.into_iter().map(Option::unwrap).collect()
}

/// True iff the Gamma-tail profile bound holds at every grid point.
pub fn check_profile_bound(p: &LevelProfile, m_opt: usize, grid: &[f64]) -> bool {
    profile_bound_points(p, m_opt, grid).iter().all(|pt| pt.holds)
}
