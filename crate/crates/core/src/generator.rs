//! Chung-Lu realization by independent per-pair coin flips.
//!
//! Two samplers produce the same distribution over simple graphs: a
//! quadratic reference that visits every pair, and an edge-skipping sampler
//! whose expected work is linear in nodes plus edges.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{expand_to_weights, DegreeDistribution, WeightSequence};
use crate::error::{Error, Result};

/// Simple undirected graph stored as an edge list with `i < j` in every pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(node_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at node {a}")));
            }
            if a.max(b) >= node_count {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) out of range for {node_count} nodes"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        let mut sorted = normalized.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate edge".into()));
        }
        Ok(Self {
            node_count,
            edges: normalized,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.node_count];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Writes `i j` per line, 0-indexed, `i < j`.
    pub fn write_edge_list<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for &(a, b) in &self.edges {
            writeln!(out, "{a} {b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    Bernoulli,
    Skip,
}

impl Sampler {
    pub fn generate(self, w: &WeightSequence, rng: &mut impl Rng) -> Graph {
        match self {
            Sampler::Bernoulli => bernoulli_with_rng(w, rng),
            Sampler::Skip => edge_skipping_with_rng(w, rng),
        }
    }
}

impl FromStr for Sampler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(Sampler::Bernoulli),
            "skip" | "edge-skipping" => Ok(Sampler::Skip),
            other => Err(Error::InvalidArgument(format!("unknown sampler {other:?}"))),
        }
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::Bernoulli => "bernoulli",
            Sampler::Skip => "skip",
        })
    }
}

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[inline]
fn pair_probability(wi: f64, wj: f64, sum: f64) -> f64 {
    (wi * wj / sum).min(1.0)
}

/// Reference sampler: one coin flip per unordered pair.
pub fn generate_bernoulli(w: &WeightSequence, seed: u64) -> Graph {
    bernoulli_with_rng(w, &mut stream_rng(seed, 0))
}

pub fn bernoulli_with_rng(w: &WeightSequence, rng: &mut impl Rng) -> Graph {
    let weights = w.weights();
    let n = weights.len();
    let sum = w.sum();
    let mut edges = Vec::new();
    for i in 0..n {
        let wi = weights[i];
        for (j, &wj) in weights.iter().enumerate().skip(i + 1) {
            if rng.gen::<f64>() < pair_probability(wi, wj, sum) {
                edges.push((i, j));
            }
        }
    }
    Graph {
        node_count: n,
        edges,
    }
}

/// Linear-work sampler with the same per-pair inclusion probabilities as
/// [`generate_bernoulli`].
pub fn generate_edge_skipping(w: &WeightSequence, seed: u64) -> Graph {
    edge_skipping_with_rng(w, &mut stream_rng(seed, 0))
}

pub fn edge_skipping_with_rng(w: &WeightSequence, rng: &mut impl Rng) -> Graph {
    let weights = w.weights();
    let n = weights.len();
    let sum = w.sum();

    // Work in descending weight order so that p(u, v) is non-increasing in v.
    let order: Option<Vec<usize>> = if weights.windows(2).all(|p| p[0] >= p[1]) {
        None
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
        Some(idx)
    };
    let weight_at = |pos: usize| match &order {
        Some(idx) => weights[idx[pos]],
        None => weights[pos],
    };
    let node_at = |pos: usize| match &order {
        Some(idx) => idx[pos],
        None => pos,
    };

    let mut edges = Vec::new();
    for u in 0..n.saturating_sub(1) {
        let wu = weight_at(u);
        let mut v = u + 1;
        // Upper bound on p(u, v') for every v' >= v.
        let mut bound = pair_probability(wu, weight_at(v), sum);
        while v < n {
            if bound < 1.0 {
                // Geometric number of failures before the next candidate under `bound`.
                let r: f64 = 1.0 - rng.gen::<f64>();
                let skip = (r.ln() / (-bound).ln_1p()).floor();
                if skip >= (n - v) as f64 {
                    break;
                }
                v += skip as usize;
            }
            let q = pair_probability(wu, weight_at(v), sum);
            if rng.gen::<f64>() * bound < q {
                let (a, b) = (node_at(u), node_at(v));
                edges.push((a.min(b), a.max(b)));
            }
            bound = q;
            v += 1;
        }
    }
    Graph {
        node_count: n,
        edges,
    }
}

/// Degree histogram over classes `1..=m`, with the excluded nodes counted separately.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeHistogram {
    pub distribution: DegreeDistribution,
    /// Nodes of degree 0.
    pub isolated: usize,
    /// Nodes of degree greater than `m`.
    pub above_max: usize,
}

pub fn degree_distribution_of(g: &Graph, m: usize) -> DegreeHistogram {
    let mut counts = vec![0.0; m.max(1)];
    let mut isolated = 0;
    let mut above_max = 0;
    for d in g.degrees() {
        match d {
            0 => isolated += 1,
            d if d > m => above_max += 1,
            d => counts[d - 1] += 1.0,
        }
    }
    DegreeHistogram {
        distribution: DegreeDistribution::new(counts).expect("counts are non-negative"),
        isolated,
        above_max,
    }
}

/// Degree counts averaged over independent realizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialStats {
    pub mean_counts: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub sampler: Sampler,
    pub node_count: usize,
    pub mean_isolated: f64,
    pub mean_above_max: f64,
}

/// Averages `degree_distribution_of` over `trials` realizations of `d`.
///
/// Trial `t` draws from stream `t` of `seed`, so results do not depend on
/// scheduling.
pub fn average_over_trials(
    d: &DegreeDistribution,
    trials: usize,
    sampler: Sampler,
    seed: u64,
) -> Result<TrialStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let weights = expand_to_weights(d)?;
    let m = d.m();
    let runs: Vec<DegreeHistogram> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = sampler.generate(&weights, &mut stream_rng(seed, t as u64));
            degree_distribution_of(&g, m)
        })
        .collect();

    let mut mean_counts = vec![0.0; m];
    let mut isolated = 0usize;
    let mut above = 0usize;
    for run in &runs {
        for (acc, c) in mean_counts.iter_mut().zip(run.distribution.counts()) {
            *acc += c;
        }
        isolated += run.isolated;
        above += run.above_max;
    }
    let t = trials as f64;
    mean_counts.iter_mut().for_each(|c| *c /= t);
    Ok(TrialStats {
        mean_counts,
        trials,
        seed,
        sampler,
        node_count: weights.len(),
        mean_isolated: isolated as f64 / t,
        mean_above_max: above as f64 / t,
    })
}
