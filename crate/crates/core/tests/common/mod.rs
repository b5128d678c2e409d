//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `V[i][k] = k^(i-1)` for `i, k = 1..=m`, as exact rationals.
pub fn vandermonde_rational(m: usize) -> Vec<Vec<BigRational>> {
    (1..=m)
        .map(|i| {
            (1..=m)
                .map(|k| BigRational::from_integer(num_traits::pow(BigInt::from(k), i - 1)))
                .collect()
        })
        .collect()
}

/// Inverse by Gauss-Jordan elimination with exact rational arithmetic.
/// Panics on a singular matrix.
pub fn gauss_jordan_inverse(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero()).expect("singular matrix");
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for v in aug[col].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &factor * p;
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Poisson mass `k^i e^{-k} / i!` evaluated in log space.
pub fn poisson_direct(i: usize, k: usize) -> f64 {
    let ln_fact: f64 = (2..=i).map(|j| (j as f64).ln()).sum();
    (i as f64 * (k as f64).ln() - k as f64 - ln_fact).exp()
}

/// Sum of `|a_i - b_i|`.
pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Inclusion frequency of every pair `(i, j)`, `i < j`, over `runs` seeded realizations,
/// alongside the exact probability `min(1, w_i w_j / S)`.
pub fn pair_frequencies(
    weights: &[f64],
    sampler: chunglu::Sampler,
    runs: usize,
    seed: u64,
) -> Vec<((usize, usize), f64, f64)> {
    let w = chunglu::WeightSequence::new(weights.to_vec()).unwrap();
    let n = weights.len();
    let mut hits = vec![vec![0usize; n]; n];
    for t in 0..runs {
        let g = sampler.generate(&w, &mut chunglu::generator::stream_rng(seed, t as u64));
        for &(i, j) in g.edges() {
            hits[i][j] += 1;
        }
    }
    let s = w.sum();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = (weights[i] * weights[j] / s).min(1.0);
            out.push(((i, j), hits[i][j] as f64 / runs as f64, p));
        }
    }
    out
}

/// Weight sets on at most six nodes, including unsorted and clamped ones.
pub fn small_weight_sets() -> Vec<Vec<f64>> {
    vec![
        vec![1.0, 2.0, 3.0, 2.0, 1.0, 1.0],
        vec![3.0, 3.0, 2.0, 1.0, 1.0],
        vec![5.0, 1.0, 1.0, 1.0],
        vec![2.0, 2.0, 2.0, 2.0, 2.0, 2.0],
        vec![0.5, 4.0, 0.25, 1.5],
    ]
}
