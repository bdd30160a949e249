//! Run reports and the commands behind the `streammatch` binary.
//!
//! Every command produces one serializable report per run. Reports carry a
//! `schema_version` and a list of named checks; a command succeeds iff all
//! of its checks pass.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{check_profile_bound, guarantee, profile_bound_points, LevelProfile, ProfilePoint};
use crate::error::{Error, Result};
use crate::exact::{hopcroft_karp, round_on_support, support_graph};
use crate::gap::{gap_decide, Decision, GapInstance, GapOutcome};
use crate::graph::ArrivalStream;
use crate::waterfill::{run_multipass_observed, Allocation, PassConfig, PassObserver, Water};

pub const SCHEMA_VERSION: u32 = 1;

/// Slack on the approximation check.
pub const RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Rational,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "rational" => Ok(Mode::Rational),
            _ => Err(Error::InvalidConfig(format!(
                "unknown mode {s:?}, expected float or rational"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &str, passed: bool, detail: Option<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mode: Mode,
    pub passes: u32,
    pub n_p: usize,
    pub n_q: usize,
    pub edges: usize,
    pub fractional_value: f64,
    pub integral_size: usize,
    pub opt_size: usize,
    pub fractional_ratio: f64,
    pub integral_ratio: f64,
    pub guarantee: f64,
    pub support_edges: usize,
    pub total_water: f64,
    pub peak_active_set: Option<usize>,
    pub pass_wall_time_ms: Vec<f64>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Records per-pass wall time and the load total after each pass.
struct PassLog {
    last: Instant,
    times: Vec<f64>,
    totals: Vec<f64>,
    forest_ok: bool,
}

impl PassLog {
    fn new() -> Self {
        PassLog {
            last: Instant::now(),
            times: Vec::new(),
            totals: Vec::new(),
            forest_ok: true,
        }
    }
}

impl<W: Water> PassObserver<W> for PassLog {
    fn after_cycle_removal(&mut self, a: &Allocation<W>) {
        self.forest_ok &= a.is_forest() && a.support_len() < a.n_p() + a.n_q();
    }

    fn after_pass(&mut self, _pass: u32, a: &Allocation<W>) {
        self.times.push(self.last.elapsed().as_secs_f64() * 1e3);
        self.totals.push(a.total_water().as_f64());
        self.last = Instant::now();
    }
}

fn ratio(value: f64, opt: usize) -> f64 {
    if opt == 0 {
        1.0
    } else {
        value / opt as f64
    }
}

/// Runs the multipass engine on `s` and checks the result against a
/// maximum matching.
pub fn run_report(s: &ArrivalStream, cfg: &PassConfig, mode: Mode) -> Result<RunReport> {
    match mode {
        Mode::Float => run_report_in::<f64>(s, cfg, mode),
        Mode::Rational => {
            let edges = s.graph().edge_count();
            if edges > crate::waterfill::EXACT_MODE_MAX_EDGES {
                return Err(Error::Refused(format!(
                    "rational mode supports at most {} edges, graph has {edges}",
                    crate::waterfill::EXACT_MODE_MAX_EDGES
                )));
            }
            run_report_in::<num_rational::BigRational>(s, cfg, mode)
        }
    }
}

fn run_report_in<W: Water>(s: &ArrivalStream, cfg: &PassConfig, mode: Mode) -> Result<RunReport> {
    let g = s.graph();
    let mut log = PassLog::new();
    let a: Allocation<W> = run_multipass_observed(s, cfg, &mut log)?;
    let k = cfg.passes;
    let fractional_value = a.matching_value(k).as_f64();
    let rounded = round_on_support(&a, k, &support_graph(&a));
    let opt_size = hopcroft_karp(g).len();
    let fractional_ratio = ratio(fractional_value, opt_size);
    let bound = guarantee(k);

    let active = g.non_isolated_left() as f64;
    let conservation = log
        .totals
        .iter()
        .enumerate()
        .all(|(j, &t)| (t - (j + 1) as f64 * active).abs() <= 1e-9 * active.max(1.0));
    let checks = vec![
        Check::new(
            "guarantee",
            fractional_ratio >= bound - RATIO_TOLERANCE,
            Some(format!("ratio {fractional_ratio:.6} vs guarantee {bound:.6}")),
        ),
        Check::new("value_at_most_opt", fractional_value <= opt_size as f64 + 1e-6, None),
        Check::new(
            "rounding",
            rounded.len() as f64 >= (fractional_value - 1e-6).ceil(),
            Some(format!("rounded {} vs fractional {fractional_value:.6}", rounded.len())),
        ),
        Check::new("conservation", conservation, None),
        Check::new("forest_support", log.forest_ok, None),
    ];
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        command: "run",
        source: None,
        seed: None,
        mode,
        passes: k,
        n_p: g.n_p(),
        n_q: g.n_q(),
        edges: g.edge_count(),
        fractional_value,
        integral_size: rounded.len(),
        opt_size,
        fractional_ratio,
        integral_ratio: ratio(rounded.len() as f64, opt_size),
        guarantee: bound,
        support_edges: a.support_len(),
        total_water: a.total_water().as_f64(),
        peak_active_set: None,
        pass_wall_time_ms: log.times,
        checks,
    })
}

/// Thread pool for batch runs, capped by `STREAMMATCH_THREADS` when set.
pub fn batch_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("STREAMMATCH_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("STREAMMATCH_THREADS={v:?} is not a count")))?;
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| Error::InvalidConfig(e.to_string()))
}

/// Parses `a..b` (half open) or a single seed.
pub fn parse_seed_range(s: &str) -> Result<std::ops::Range<u64>> {
    let bad = || Error::InvalidConfig(format!("bad seed range {s:?}, expected a..b"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a >= b {
                return Err(bad());
            }
            Ok(a..b)
        }
        None => {
            let a: u64 = s.trim().parse().map_err(|_| bad())?;
            Ok(a..a + 1)
        }
    }
}

/// One job of a batch: a stream plus a label and the order seed it used.
pub struct BatchJob {
    pub source: String,
    pub seed: Option<u64>,
    pub stream: ArrivalStream,
}

/// Runs every job on the batch pool, keeping input order in the output.
pub fn run_batch(jobs: Vec<BatchJob>, cfg: &PassConfig, mode: Mode) -> Result<Vec<Result<RunReport>>> {
    let pool = batch_pool()?;
    Ok(pool.install(|| {
        jobs.into_par_iter()
            .map(|job| {
                let mut r = run_report(&job.stream, cfg, mode)?;
                r.source = Some(job.source);
                r.seed = job.seed;
                Ok(r)
            })
            .collect()
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub n_advertisers: usize,
    pub n_impressions: u64,
    #[serde(flatten)]
    pub outcome: GapOutcome,
    pub active_set_limit: f64,
    pub checks: Vec<Check>,
}

impl GapReport {
    pub fn decision(&self) -> Decision {
        self.outcome.decision
    }

    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Decides `inst` at `eps`. `expect` adds a check on the answer.
pub fn gap_report(inst: &GapInstance, eps: f64, expect: Option<Decision>) -> Result<GapReport> {
    let outcome = gap_decide(inst, eps)?;
    let limit = 5.0 * outcome.sum_budgets as f64 / eps;
    let mut checks = vec![Check::new(
        "active_set_space",
        outcome.peak_active_set as f64 <= limit,
        Some(format!("peak {} vs limit {limit:.1}", outcome.peak_active_set)),
    )];
    if let Some(want) = expect {
        checks.push(Check::new(
            "expected_decision",
            outcome.decision == want,
            Some(format!("got {}, expected {want}", outcome.decision)),
        ));
    }
    Ok(GapReport {
        schema_version: SCHEMA_VERSION,
        command: "gap",
        source: None,
        n_advertisers: inst.advertisers.len(),
        n_impressions: inst.n_impressions,
        outcome,
        active_set_limit: limit,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub passes: u32,
    pub n_p: usize,
    pub n_q: usize,
    pub opt_size: usize,
    pub perfect_matching: bool,
    pub fractional_value: f64,
    pub empirical_ratio: f64,
    pub guarantee: f64,
    /// Right-vertex loads, sorted descending.
    pub profile: Vec<f64>,
    pub bound_checked: bool,
    pub points: Vec<ProfilePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub checks: Vec<Check>,
}

impl AnalyzeReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Level profile after `passes` and, when the graph has a perfect
/// matching, the profile lower bound at every grid point.
/// With `require_perfect` a missing perfect matching fails the report.
pub fn analyze_report(s: &ArrivalStream, passes: u32, require_perfect: bool) -> Result<AnalyzeReport> {
    let g = s.graph();
    let cfg = PassConfig::new(passes);
    let a: Allocation<f64> = run_multipass_observed(s, &cfg, &mut ())?;
    let opt_size = hopcroft_karp(g).len();
    let perfect = opt_size == g.n_p() && opt_size == g.n_q();
    let profile = LevelProfile::from_allocation(&a, passes);
    let fractional_value = a.matching_value(passes);
    let mut checks = Vec::new();
    let (points, warning) = if perfect {
        let grid = profile.default_grid();
        let points = profile_bound_points(&profile, opt_size, &grid);
        checks.push(Check::new(
            "profile_bound",
            check_profile_bound(&profile, opt_size, &grid),
            None,
        ));
        (points, None)
    } else {
        if require_perfect {
            checks.push(Check::new(
                "perfect_matching",
                false,
                Some(format!(
                    "maximum matching {opt_size} on {}+{} vertices",
                    g.n_p(),
                    g.n_q()
                )),
            ));
        }
        (
            Vec::new(),
            Some("no perfect matching; profile bound check skipped".to_string()),
        )
    };
    let mut loads = profile.loads().to_vec();
    loads.reverse();
    Ok(AnalyzeReport {
        schema_version: SCHEMA_VERSION,
        command: "analyze",
        source: None,
        passes,
        n_p: g.n_p(),
        n_q: g.n_q(),
        opt_size,
        perfect_matching: perfect,
        fractional_value,
        empirical_ratio: ratio(fractional_value, opt_size),
        guarantee: guarantee(passes),
        profile: loads,
        bound_checked: perfect,
        points,
        warning,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// A quick battery over every module, small enough to finish in seconds.
pub fn selftest() -> Result<SelftestReport> {
    use crate::analysis::{canonical_decomposition, gamma_tail, verify_decomposition};
    use crate::exact::brute_force_max_matching;
    use crate::gap::{Advertiser, Neighborhood};
    use crate::gen::{gen_planted, gen_upper_triangular, rng};
    use crate::graph::BipartiteGraph;
    use rand::Rng;

    let mut checks = Vec::new();

    let tri = gen_upper_triangular(2)?;
    let r = run_report(&tri.stream, &PassConfig::new(1), Mode::Rational)?;
    checks.push(Check::new(
        "hand_2x2",
        r.fractional_value == 1.5 && r.opt_size == 2,
        Some(format!("value {}", r.fractional_value)),
    ));

    checks.push(Check::new(
        "closed_form",
        (guarantee(1) - (1.0 - (-1f64).exp())).abs() < 1e-12 && gamma_tail(4, 0.0) == 1.0,
        None,
    ));

    let mut rng = rng(7);
    let mut oracle_ok = true;
    let mut decomposition_ok = true;
    for _ in 0..50 {
        let n_p = rng.gen_range(1..=8);
        let n_q = rng.gen_range(1..=8);
        let adj = (0..n_p)
            .map(|_| (0..n_q).filter(|_| rng.gen_bool(0.3)).collect())
            .collect();
        let g = BipartiteGraph::new(n_q, adj)?;
        oracle_ok &= hopcroft_karp(&g).len() == brute_force_max_matching(&g)?;
        decomposition_ok &= verify_decomposition(&g, &canonical_decomposition(&g)?)?;
    }
    checks.push(Check::new("matching_oracles_agree", oracle_ok, None));
    checks.push(Check::new("canonical_decomposition", decomposition_ok, None));

    let planted = gen_planted(60, 0.1, 1)?;
    for k in [1, 3] {
        let r = run_report(&planted.stream, &PassConfig::new(k), Mode::Float)?;
        checks.push(Check::new(&format!("planted_k{k}"), r.passed(), None));
        let a = analyze_report(&planted.stream, k, true)?;
        checks.push(Check::new(&format!("profile_bound_k{k}"), a.passed(), None));
    }

    let iv = |lo, hi| Neighborhood::Interval { lo, hi };
    let yes = GapInstance {
        n_impressions: 10,
        epsilon: 0.2,
        advertisers: vec![Advertiser {
            budget: 3,
            neighbors: iv(0, 2),
        }],
    };
    let no = GapInstance {
        n_impressions: 10,
        epsilon: 0.2,
        advertisers: vec![
            Advertiser {
                budget: 3,
                neighbors: iv(0, 1),
            },
            Advertiser {
                budget: 3,
                neighbors: iv(0, 1),
            },
            Advertiser {
                budget: 3,
                neighbors: iv(0, 1),
            },
        ],
    };
    checks.push(Check::new(
        "gap_yes",
        gap_report(&yes, 0.2, Some(Decision::Yes))?.passed(),
        None,
    ));
    checks.push(Check::new(
        "gap_no",
        gap_report(&no, 0.2, Some(Decision::No))?.passed(),
        None,
    ));

    Ok(SelftestReport {
        schema_version: SCHEMA_VERSION,
        command: "selftest",
        checks,
    })
}
