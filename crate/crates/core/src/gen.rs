//! Seeded instance generators.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64`, so a spec
//! determines its output bit for bit on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::{Advertiser, GapInstance, Neighborhood, MATERIALIZE_MAX_IMPRESSIONS};
use crate::graph::{write_stream, ArrivalStream, BipartiteGraph, Matching, OrderPolicy};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A generated stream with whatever the construction knows about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub stream: ArrivalStream,
    /// Maximum matching size, when known by construction.
    pub opt: Option<usize>,
    pub planted: Option<Matching>,
    pub label: String,
}

impl Generated {
    /// Stream format with the metadata as leading comments.
    pub fn to_text(&self) -> Vec<u8> {
        let mut out = format!("# {}\n", self.label).into_bytes();
        if let Some(opt) = self.opt {
            out.extend(format!("# opt {opt}\n").bytes());
        }
        out.extend(write_stream(&self.stream));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenKind {
    Planted { n: usize, extra_prob: f64 },
    UpperTriangular { n: usize },
    LayeredAdversarial { phases: usize, width: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub kind: GenKind,
    pub seed: u64,
    pub order: OrderPolicy,
}

impl GenSpec {
    pub fn generate(&self) -> Result<Generated> {
        let mut g = match self.kind {
            GenKind::Planted { n, extra_prob } => gen_planted(n, extra_prob, self.seed)?,
            GenKind::UpperTriangular { n } => gen_upper_triangular(n)?,
            GenKind::LayeredAdversarial { phases, width } => gen_layered_adversarial(phases, width, self.seed)?,
        };
        // decorrelate the order shuffle from the edge draws
        g.stream = g.stream.reordered(self.order, self.seed ^ 0x9e37_79b9_7f4a_7c15);
        if self.order != OrderPolicy::Given {
            g.label = format!("{} order={:?}", g.label, self.order).to_lowercase();
        }
        Ok(g)
    }
}

/// `n + n` vertices with a planted perfect matching under a random
/// permutation, plus every other edge independently with `extra_prob`.
pub fn gen_planted(n: usize, extra_prob: f64, seed: u64) -> Result<Generated> {
    if n < 1 || !(0.0..=1.0).contains(&extra_prob) {
        return Err(Error::InvalidConfig(format!(
            "planted: need n >= 1 and extra_prob in [0, 1], got n={n}, p={extra_prob}"
        )));
    }
    let mut rng = rng(seed);
    let mut partner: Vec<usize> = (0..n).collect();
    partner.shuffle(&mut rng);
    let adj = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v == partner[u] || (extra_prob > 0.0 && rng.gen_bool(extra_prob)))
                .collect()
        })
        .collect();
    let graph = BipartiteGraph::new(n, adj)?;
    Ok(Generated {
        stream: ArrivalStream::in_id_order(graph),
        opt: Some(n),
        planted: Some(Matching::new(partner.into_iter().enumerate().collect())),
        label: format!("planted n={n} extra_prob={extra_prob} seed={seed}"),
    })
}

/// `u_i` adjacent to `v_i, ..., v_{n-1}`, arriving in id order.
pub fn gen_upper_triangular(n: usize) -> Result<Generated> {
    if n < 1 {
        return Err(Error::InvalidConfig("upper triangular: need n >= 1".into()));
    }
    let adj = (0..n).map(|i| (i..n).collect()).collect();
    let graph = BipartiteGraph::new(n, adj)?;
    Ok(Generated {
        stream: ArrivalStream::in_id_order(graph),
        opt: Some(n),
        planted: Some(Matching::new((0..n).map(|i| (i, i)).collect())),
        label: format!("upper_triangular n={n}"),
    })
}

/// A `phases + 1`-phase stress instance loosely modeled on phased hard
/// inputs for one-pass algorithms. It is not a packing construction and
/// certifies nothing about lower bounds.
///
/// Right vertices form `phases + 1` blocks of `width`. A vertex of phase
/// `j` owns one private partner in block `j` and additionally sees each
/// vertex of every later block with probability 1/2, so early phases spill
/// water onto vertices that later phases need. The last phase sees only its
/// reserved block. The private partners give `opt = (phases + 1) * width`.
pub fn gen_layered_adversarial(phases: usize, width: usize, seed: u64) -> Result<Generated> {
    if phases < 1 || width < 2 {
        return Err(Error::InvalidConfig(format!(
            "layered: need phases >= 1 and width >= 2, got phases={phases}, width={width}"
        )));
    }
    let mut rng = rng(seed);
    let blocks = phases + 1;
    let n = blocks * width;
    let mut adj = Vec::with_capacity(n);
    let mut order = Vec::with_capacity(n);
    for j in 0..blocks {
        let mut phase: Vec<usize> = (0..width).map(|i| j * width + i).collect();
        phase.shuffle(&mut rng);
        order.extend(phase);
        for i in 0..width {
            let mut nbrs = vec![j * width + i];
            nbrs.extend(((j + 1) * width..n).filter(|_| rng.gen_bool(0.5)));
            adj.push(nbrs);
        }
    }
    let graph = BipartiteGraph::new(n, adj)?;
    Ok(Generated {
        stream: ArrivalStream::new(graph, order)?,
        opt: Some(n),
        planted: Some(Matching::new((0..n).map(|i| (i, i)).collect())),
        label: format!("layered_adversarial phases={phases} width={width} seed={seed}"),
    })
}

/// Which side of the gap a lop-sided instance is planted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantedAnswer {
    /// A matching with the full budgets exists.
    Yes,
    /// No matching with budgets `floor((1 - eps) B_a)` exists.
    StrongNo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LopsidedSpec {
    pub n_advertisers: usize,
    pub n_impressions: u64,
    pub max_budget: u32,
    /// Force the budgets to sum to this value.
    pub total_budget: Option<u64>,
    pub answer: PlantedAnswer,
    pub epsilon: f64,
    /// Emit explicit neighbor lists instead of intervals.
    pub explicit: bool,
    pub seed: u64,
}

impl LopsidedSpec {
    pub fn new(n_advertisers: usize, n_impressions: u64, max_budget: u32, seed: u64) -> Self {
        LopsidedSpec {
            n_advertisers,
            n_impressions,
            max_budget,
            total_budget: None,
            answer: PlantedAnswer::Yes,
            epsilon: 0.2,
            explicit: false,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedGap {
    pub instance: GapInstance,
    pub answer: PlantedAnswer,
}

/// Lop-sided interval instances. Each advertiser gets a private block of
/// `B_a` consecutive impressions (blocks packed with small random gaps at a
/// random offset) and an interval that covers its block plus a random
/// margin, so a full-budget matching exists. Strong NO instances then
/// squeeze a group of advertisers into one window with fewer impressions
/// than their reduced budgets. Both answers are verified exactly.
pub fn gen_lopsided_interval(spec: &LopsidedSpec) -> Result<GeneratedGap> {
    let &LopsidedSpec {
        n_advertisers: n_a,
        n_impressions: n_i,
        max_budget,
        total_budget,
        answer,
        epsilon,
        explicit,
        seed,
    } = spec;
    if n_a < 1 || max_budget < 1 || !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidConfig(
            "lopsided: need advertisers >= 1, max_budget >= 1, epsilon in (0, 1/2)".into(),
        ));
    }
    let mut rng = rng(seed);

    let mut budgets: Vec<u32> = (0..n_a).map(|_| rng.gen_range(1..=max_budget)).collect();
    if let Some(total) = total_budget {
        if total < n_a as u64 || total > n_a as u64 * max_budget as u64 {
            return Err(Error::InvalidConfig(format!(
                "lopsided: total budget {total} unreachable with {n_a} advertisers and max budget {max_budget}"
            )));
        }
        let mut sum: u64 = budgets.iter().map(|&b| b as u64).sum();
        while sum != total {
            let a = rng.gen_range(0..n_a);
            if sum < total && budgets[a] < max_budget {
                budgets[a] += 1;
                sum += 1;
            } else if sum > total && budgets[a] > 1 {
                budgets[a] -= 1;
                sum -= 1;
            }
        }
    }
    let sum_budgets: u64 = budgets.iter().map(|&b| b as u64).sum();
    if sum_budgets > n_i {
        return Err(Error::InvalidConfig(format!(
            "lopsided: budgets sum to {sum_budgets} but only {n_i} impressions exist"
        )));
    }
    if explicit && n_i > MATERIALIZE_MAX_IMPRESSIONS {
        return Err(Error::InvalidConfig(
            "lopsided: explicit lists need a materializable universe".into(),
        ));
    }

    // pack private blocks with gaps of 0..=max_gap at a random offset
    let max_gap = if n_i >= 2 * sum_budgets + n_a as u64 { 1 } else { 0 };
    let mut layout: Vec<usize> = (0..n_a).collect();
    layout.shuffle(&mut rng);
    let gaps: Vec<u64> = (0..n_a).map(|_| rng.gen_range(0..=max_gap)).collect();
    let span = sum_budgets + gaps.iter().sum::<u64>();
    let mut cursor = rng.gen_range(0..=n_i - span);
    let mut blocks = vec![(0u64, 0u64); n_a];
    for (slot, &a) in layout.iter().enumerate() {
        cursor += gaps[slot];
        blocks[a] = (cursor, cursor + budgets[a] as u64 - 1);
        cursor += budgets[a] as u64;
    }
    let mut intervals: Vec<(u64, u64)> = blocks
        .iter()
        .zip(&budgets)
        .map(|(&(lo, hi), &b)| {
            let margin = (b as u64).max(2);
            let left = rng.gen_range(0..=margin);
            let right = rng.gen_range(0..=margin);
            (lo.saturating_sub(left), (hi + right).min(n_i - 1))
        })
        .collect();

    let reduced: Vec<u64> = budgets
        .iter()
        .map(|&b| ((1.0 - epsilon) * b as f64 + 1e-9).floor() as u64)
        .collect();
    let mut group = Vec::new();
    if answer == PlantedAnswer::StrongNo {
        let mut eligible: Vec<usize> = (0..n_a).filter(|&a| reduced[a] >= 1).collect();
        eligible.shuffle(&mut rng);
        let want = rng.gen_range(2..=4);
        let mut demand = 0;
        for &a in &eligible {
            if group.len() >= want && demand >= 2 {
                break;
            }
            group.push(a);
            demand += reduced[a];
        }
        if demand < 2 {
            return Err(Error::InvalidConfig(
                "lopsided: budgets too small to plant a strong NO instance".into(),
            ));
        }
        let window = demand - 1;
        let anchor = blocks[group[0]].0.min(n_i - window);
        for &a in &group {
            intervals[a] = (anchor, anchor + window - 1);
        }
    }

    let advertisers = budgets
        .iter()
        .zip(&intervals)
        .map(|(&budget, &(lo, hi))| {
            let neighbors = if explicit {
                let mut ids: Vec<u64> = (lo..=hi).collect();
                if answer == PlantedAnswer::Yes {
                    ids.extend((0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..n_i)));
                    ids.sort_unstable();
                    ids.dedup();
                }
                Neighborhood::List(ids)
            } else {
                Neighborhood::Interval { lo, hi }
            };
            Advertiser { budget, neighbors }
        })
        .collect();
    let instance = GapInstance {
        n_impressions: n_i,
        epsilon,
        advertisers,
    };

    let budgets64: Vec<u64> = budgets.iter().map(|&b| b as u64).collect();
    let verified = match answer {
        PlantedAnswer::Yes => instance.complete_matching_exists(&budgets64)?,
        PlantedAnswer::StrongNo => !instance.complete_matching_exists(&reduced)?,
    };
    if !verified {
        return Err(Error::InvalidConfig(format!(
            "lopsided: planted {answer:?} failed exact verification"
        )));
    }
    Ok(GeneratedGap { instance, answer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::hopcroft_karp;
    use crate::graph::validate_matching;

    #[test]
    fn planted_extremes() {
        let g = gen_planted(6, 0.0, 3).unwrap();
        assert_eq!(g.stream.graph().edge_count(), 6);
        assert!(validate_matching(g.stream.graph(), g.planted.as_ref().unwrap()));
        let g = gen_planted(6, 1.0, 3).unwrap();
        assert_eq!(g.stream.graph().edge_count(), 36);
    }

    #[test]
    fn planted_opt_is_exact() {
        for seed in 0..20 {
            let g = gen_planted(30, 0.1, seed).unwrap();
            assert_eq!(hopcroft_karp(g.stream.graph()).len(), 30);
        }
    }

    #[test]
    fn upper_triangular_shape() {
        let g = gen_upper_triangular(1).unwrap();
        assert_eq!(g.stream.graph().edge_count(), 1);
        let g = gen_upper_triangular(2).unwrap();
        assert_eq!(g.stream.graph().neighbors(0), &[0, 1]);
        assert_eq!(g.stream.graph().neighbors(1), &[1]);
    }

    #[test]
    fn layered_opt_matches_oracle() {
        for (phases, width, seed) in [(1, 2, 0), (2, 5, 1), (4, 10, 2), (8, 20, 3)] {
            let g = gen_layered_adversarial(phases, width, seed).unwrap();
            assert_eq!(Some(hopcroft_karp(g.stream.graph()).len()), g.opt);
        }
    }

    #[test]
    fn same_spec_same_bytes() {
        let spec = GenSpec {
            kind: GenKind::Planted { n: 40, extra_prob: 0.1 },
            seed: 11,
            order: OrderPolicy::Random,
        };
        assert_eq!(spec.generate().unwrap().to_text(), spec.generate().unwrap().to_text());
        let other = GenSpec {
            seed: 12,
            ..spec.clone()
        };
        assert_ne!(spec.generate().unwrap().to_text(), other.generate().unwrap().to_text());
    }

    #[test]
    fn lopsided_tiny_cases() {
        // one advertiser, budget 3, interval [0, 2]
        let inst = GapInstance {
            n_impressions: 3,
            epsilon: 0.2,
            advertisers: vec![Advertiser {
                budget: 3,
                neighbors: Neighborhood::Interval { lo: 0, hi: 2 },
            }],
        };
        assert!(inst.complete_matching_exists(&[3]).unwrap());
        // two advertisers budget 2 on [0, 1]: reduced budgets 1 + 1 fit, full 4 do not
        let two = Advertiser {
            budget: 2,
            neighbors: Neighborhood::Interval { lo: 0, hi: 1 },
        };
        let inst = GapInstance {
            n_impressions: 10,
            epsilon: 0.2,
            advertisers: vec![two.clone(), two],
        };
        assert!(!inst.complete_matching_exists(&[2, 2]).unwrap());
    }

    #[test]
    fn lopsided_planted_answers() {
        for seed in 0..10 {
            for answer in [PlantedAnswer::Yes, PlantedAnswer::StrongNo] {
                for (n_i, explicit) in [(120, true), (1_000_000, false)] {
                    let spec = LopsidedSpec {
                        total_budget: Some(60),
                        answer,
                        explicit,
                        ..LopsidedSpec::new(20, n_i, 5, seed)
                    };
                    let g = gen_lopsided_interval(&spec).unwrap();
                    assert_eq!(g.instance.sum_budgets(), 60);
                    g.instance.validate().unwrap();
                }
            }
        }
    }
}
