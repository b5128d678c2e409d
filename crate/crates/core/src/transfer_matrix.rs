//! Machine-precision Poisson transfer matrix.
//!
//! `P[i][k] = k^i e^{-k} / i!` maps an input distribution over expected
//! degrees `k = 1..m` (columns) to the expected number of nodes realized with
//! degree `i = 1..m` (rows). It factors as `A V B` with `A = diag(1/i!)`,
//! `V[i][k] = k^(i-1)` and `B = diag(k e^{-k})`.

use crate::distributions::DegreeDistribution;
use crate::error::{Error, Result};

/// Largest `m` for which every entry of `P` is a normal `f64`.
pub const MAX_MACHINE_DIM: usize = 170;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    m: usize,
    /// Row-major, row = output degree.
    entries: Vec<f64>,
    a_diag: Vec<f64>,
    b_diag: Vec<f64>,
}

impl TransferMatrix {
    pub fn new(m: usize) -> Result<Self> {
        build_transfer_matrix(m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Entry for output degree `i` and input class `k`, both 1-based.
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.entries[(i - 1) * self.m + (k - 1)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[(i - 1) * self.m..i * self.m]
    }

    /// `1/i!` for `i = 1..m`.
    pub fn a_diag(&self) -> &[f64] {
        &self.a_diag
    }

    /// `k e^{-k}` for `k = 1..m`.
    pub fn b_diag(&self) -> &[f64] {
        &self.b_diag
    }

    /// `V[i][k] = k^(i-1)`. Overflows to infinity past roughly `m = 143`.
    pub fn vandermonde(&self, i: usize, k: usize) -> f64 {
        (k as f64).powi(i as i32 - 1)
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (1..=self.m)
            .map(|k| (1..=self.m).map(|i| self.get(i, k)).sum())
            .collect()
    }

    /// Induced 1-norm (largest column sum), as `1 - min deficit`.
    ///
    /// Summing a column directly can land on or above 1.0 near `m = 100`;
    /// the deficits keep the true margin, which may still be below one ulp.
    pub fn one_norm(&self) -> f64 {
        1.0 - self.column_deficits().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `1 - column_sum(k)`, evaluated as the Poisson mass outside `1..=m`:
    /// `e^{-k}` plus the upper tail beyond `m`.
    pub fn column_deficits(&self) -> Vec<f64> {
        (1..=self.m)
            .map(|k| {
                let kf = k as f64;
                let mut term = self.get(self.m, k);
                let mut tail = 0.0;
                let mut i = self.m;
                loop {
                    i += 1;
                    term *= kf / i as f64;
                    tail += term;
                    if term <= tail * 1e-17 || term == 0.0 {
                        break;
                    }
                }
                (-kf).exp() + tail
            })
            .collect()
    }

    pub fn row_min(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn row_max(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.len(),
            });
        }
        Ok(self
            .entries
            .chunks_exact(self.m)
            .map(|row| row.iter().zip(x).map(|(p, v)| p * v).sum())
            .collect())
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.len(),
            });
        }
        Ok((1..=self.m)
            .map(|k| (1..=self.m).map(|i| self.get(i, k) * x[i - 1]).sum())
            .collect())
    }
}

pub fn build_transfer_matrix(m: usize) -> Result<TransferMatrix> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if m > MAX_MACHINE_DIM {
        return Err(Error::DimensionTooLarge {
            m,
            limit: MAX_MACHINE_DIM,
        });
    }
    let b_diag: Vec<f64> = (1..=m).map(|k| k as f64 * (-(k as f64)).exp()).collect();
    let mut a_diag = Vec::with_capacity(m);
    let mut inv_fact = 1.0;
    for i in 1..=m {
        inv_fact /= i as f64;
        a_diag.push(inv_fact);
    }

    // Row i+1 from row i: poiss(k, i+1) = poiss(k, i) * k / (i+1).
    let mut entries = vec![0.0; m * m];
    entries[..m].copy_from_slice(&b_diag);
    for i in 1..m {
        for k in 1..=m {
            entries[i * m + k - 1] = entries[(i - 1) * m + k - 1] * k as f64 / (i + 1) as f64;
        }
    }
    Ok(TransferMatrix {
        m,
        entries,
        a_diag,
        b_diag,
    })
}

/// Expected realized distribution `P x` over classes `1..m`.
pub fn predict_output(p: &TransferMatrix, x: &DegreeDistribution) -> Result<Vec<f64>> {
    p.apply(x.counts())
}

/// `(r/2) P 1`: the average of `P x` over the cube `[0, r]^m`.
pub fn mean_action(p: &TransferMatrix, r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "hypercube side must be positive, got {r}"
        )));
    }
    let ones = vec![1.0; p.m()];
    Ok(p.apply(&ones)?.into_iter().map(|v| v * r / 2.0).collect())
}

/// Poisson means between degree families: `gamma[i][j] = i * j * N_j / S`
/// for classes `i, j` of `d`, where `S` is the total weight.
pub fn family_means(d: &DegreeDistribution) -> Vec<Vec<f64>> {
    let total: f64 = d
        .counts()
        .iter()
        .enumerate()
        .map(|(j, c)| (j + 1) as f64 * c)
        .sum();
    (1..=d.m())
        .map(|i| {
            (1..=d.m())
                .map(|j| i as f64 * j as f64 * d.count(j) / total)
                .collect()
        })
        .collect()
}
