//! Degree distributions, per-node weight sequences and the error metric
//! used to compare them.

use serde::Serialize;

use crate::error::{Error, Result};

/// Node counts per degree class `1..=m`. Index 0 holds class 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeDistribution {
    counts: Vec<f64>,
}

impl DegreeDistribution {
    pub fn new(counts: Vec<f64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument(
                "a degree distribution needs at least one class".into(),
            ));
        }
        for (i, &c) in counts.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::InvalidCount {
                    degree: i + 1,
                    count: c,
                });
            }
        }
        Ok(Self { counts })
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            counts: vec![0.0; m.max(1)],
        }
    }

    /// Maximum degree class.
    pub fn m(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// Count for degree class `k` (1-based).
    pub fn count(&self, k: usize) -> f64 {
        self.counts[k - 1]
    }

    pub fn total_nodes(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn is_integral(&self) -> bool {
        self.counts.iter().all(|c| c.fract() == 0.0)
    }

    /// Rounds every class to the nearest integer.
    pub fn rounded(&self) -> Self {
        Self {
            counts: self.counts.iter().map(|c| c.round()).collect(),
        }
    }
}

/// Expected degrees, one per node.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    weights: Vec<f64>,
    sum: f64,
}

impl WeightSequence {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((i, &w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w <= 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "weight {i} must be positive and finite, got {w}"
            )));
        }
        let sum = weights.iter().sum();
        Ok(Self { weights, sum })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `counts[k] = round(n * k^-beta)` for `k = 1..=m`.
pub fn power_law_distribution(n: f64, beta: f64, m: usize) -> Result<DegreeDistribution> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if !(n >= 0.0 && n.is_finite()) || !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "power law needs finite n >= 0 and beta >= 0, got n={n}, beta={beta}"
        )));
    }
    let counts = (1..=m)
        .map(|k| (n * (k as f64).powf(-beta) + 0.5).floor())
        .collect();
    DegreeDistribution::new(counts)
}

/// One weight `k` per node of class `k`, in descending weight order.
pub fn expand_to_weights(d: &DegreeDistribution) -> Result<WeightSequence> {
    let mut weights = Vec::with_capacity(d.total_nodes() as usize);
    for (i, &c) in d.counts().iter().enumerate().rev() {
        if c.fract() != 0.0 {
            return Err(Error::FractionalCount {
                degree: i + 1,
                count: c,
            });
        }
        weights.extend(std::iter::repeat_n((i + 1) as f64, c as usize));
    }
    WeightSequence::new(weights)
}

/// `||target - observed||_1 / ||target||_1` over classes `1..=m`.
pub fn proportional_l1_error(target: &[f64], observed: &[f64]) -> Result<f64> {
    if target.len() != observed.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            got: observed.len(),
        });
    }
    let norm: f64 = target.iter().map(|t| t.abs()).sum();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let diff: f64 = target
        .iter()
        .zip(observed)
        .map(|(t, o)| (t - o).abs())
        .sum();
    Ok(diff / norm)
}
