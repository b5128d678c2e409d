//! Can a desired output distribution be produced by a non-negative input?
//!
//! The verdict comes from the sign of the shifted input `P^-1 y`. The
//! per-class bounds, the image hyperplane through `P H_N` and the admissible
//! range of node counts `N` are reported alongside as explanations.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_inverse::ExactInverse;
use crate::generator::stream_rng;
use crate::precision::{PrecisionContext, Real};
use crate::transfer_matrix::{build_transfer_matrix, TransferMatrix};

/// Row minima below this make the upper end of the `N` range meaningless.
pub const NEGLIGIBLE_ROW_MIN: f64 = 1e-30;

const BOUND_REL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassBound {
    pub class: usize,
    pub value: f64,
    /// `N * min_k P[i][k]`.
    pub lower: f64,
    /// `N * max_k P[i][k]`.
    pub upper: f64,
    /// `N * P[i][i]`, the diagonal form of the upper bound.
    pub diagonal_upper: f64,
    pub ok: bool,
    /// Distance to the nearest bound; negative when violated.
    pub margin: f64,
}

/// `N min_k P[i][k] <= y_i <= N max_k P[i][k]` for each output class.
pub fn class_bounds(p: &TransferMatrix, y: &[f64], n: f64) -> Result<Vec<ClassBound>> {
    if y.len() != p.m() {
        return Err(Error::DimensionMismatch {
            expected: p.m(),
            got: y.len(),
        });
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("N must be positive, got {n}")));
    }
    Ok(y.iter()
        .enumerate()
        .map(|(idx, &value)| {
            let i = idx + 1;
            let lower = n * p.row_min(i);
            let upper = n * p.row_max(i);
            let slack = BOUND_REL_SLACK * upper;
            let margin = (value - lower).min(upper - value);
            ClassBound {
                class: i,
                value,
                lower,
                upper,
                diagonal_upper: n * p.get(i, i),
                ok: margin >= -slack,
                margin,
            }
        })
        .collect())
}

/// `omega = (P^-1)^T 1`, the normal of the image hyperplane (`P^T omega = 1`).
pub fn compute_omega(inv: &ExactInverse) -> Vec<Real> {
    let ones = vec![Real::one(); inv.m()];
    inv.apply_inverse_transpose(&ones)
        .expect("ones vector has the inverse's dimension")
}

/// `||P^T omega - 1||_1` at working precision.
pub fn omega_residual(inv: &ExactInverse, omega: &[Real]) -> Result<Real> {
    let pt = inv.forward_transpose(omega)?;
    Ok(pt.iter().map(|v| (v - &Real::one()).abs()).sum())
}

/// `(y - (N/m) P 1, omega)`; zero when `y` lies on the image of `H_N`.
pub fn hyperplane_residual(inv: &ExactInverse, y: &[Real], n: &Real, omega: &[Real]) -> Result<Real> {
    let m = inv.m();
    if y.len() != m || omega.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: if y.len() != m { y.len() } else { omega.len() },
        });
    }
    let digits = inv.context().digits();
    let p_one = inv.forward(&vec![Real::one(); m])?;
    let scale = n.div(&Real::from(m as i64), digits + 10);
    let along = Real::dot(y, omega);
    let mean = &Real::dot(&p_one, omega) * &scale;
    Ok((&along - &mean).round(digits))
}

/// Admissible node counts `||y||_1 <= N <= y_m / min_k P[m][k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NRange {
    pub lower: f64,
    /// `None` when `y_m = 0` (degenerate) or the row minimum is negligible.
    pub upper: Option<f64>,
    pub row_min: f64,
    pub informative: bool,
}

pub fn n_search_range(p: &TransferMatrix, y: &[f64]) -> Result<NRange> {
    let m = p.m();
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y.len(),
        });
    }
    let lower = y.iter().map(|v| v.abs()).sum();
    let row_min = p.row_min(m);
    let y_m = y[m - 1];
    let informative = row_min >= NEGLIGIBLE_ROW_MIN && y_m > 0.0;
    Ok(NRange {
        lower,
        upper: informative.then(|| y_m / row_min),
        row_min,
        informative,
    })
}

/// Best `N` on a 100-point log grid over the search range, by `|hyperplane residual|`.
pub fn scan_n(inv: &ExactInverse, y: &[Real], omega: &[Real], range: &NRange) -> Result<Option<(f64, Real)>> {
    let upper = match range.upper {
        Some(u) if range.lower > 0.0 && u >= range.lower => u,
        _ => return Ok(None),
    };
    let (lo, hi) = (range.lower.ln(), upper.ln());
    let mut best: Option<(f64, Real)> = None;
    for step in 0..100 {
        let n = (lo + (hi - lo) * step as f64 / 99.0).exp();
        let r = hyperplane_residual(inv, y, &Real::from_f64(n), omega)?.abs();
        if best.as_ref().is_none_or(|(_, b)| r < *b) {
            best = Some((n, r));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub m: usize,
    pub digits: u32,
    /// Node count used for the bounds and the hyperplane: `||P^-1 y||_1`.
    pub n: Real,
    pub bounds: Vec<ClassBound>,
    pub bounds_ok: bool,
    pub n_range: NRange,
    pub hyperplane_residual: Real,
    pub hyperplane_ok: bool,
    pub omega: Vec<Real>,
    pub omega_residual: Real,
    /// All entries of `P^-1 y` are non-negative within tolerance.
    pub direct_feasible: bool,
    pub negative_classes: Vec<usize>,
}

/// `10^-(digits/4) * max(1, N)`.
pub fn hyperplane_tolerance(ctx: &PrecisionContext, n: &Real) -> Real {
    let scale = if *n > Real::one() { n.clone() } else { Real::one() };
    &Real::pow10(-((ctx.digits() / 4) as i64)) * &scale
}

/// Runs every diagnostic for the target `y` with `N = ||P^-1 y||_1`.
pub fn check(inv: &ExactInverse, y: &[Real]) -> Result<FeasibilityReport> {
    let m = inv.m();
    let ctx = inv.context();
    let digits = ctx.digits();
    let p = build_transfer_matrix(m)?;
    let shift = inv.shift(y)?;
    let n: Real = shift.x_real.iter().map(Real::abs).sum::<Real>().round(digits);
    let y_f64: Vec<f64> = y.iter().map(Real::to_f64).collect();
    let n_f64 = n.to_f64();
    let bounds = if n_f64 > 0.0 {
        class_bounds(&p, &y_f64, n_f64)?
    } else {
        Vec::new()
    };
    let omega = compute_omega(inv);
    let omega_residual = omega_residual(inv, &omega)?.round(20);
    let residual = hyperplane_residual(inv, y, &n, &omega)?;
    let hyperplane_ok = residual.abs() <= hyperplane_tolerance(&ctx, &n);
    Ok(FeasibilityReport {
        m,
        digits,
        bounds_ok: !bounds.is_empty() && bounds.iter().all(|b| b.ok),
        bounds,
        n_range: n_search_range(&p, &y_f64)?,
        hyperplane_residual: residual.round(20),
        hyperplane_ok,
        omega,
        omega_residual,
        direct_feasible: shift.feasible,
        negative_classes: shift.negative_classes,
        n,
    })
}

/// Images `P x` of random integer vectors `x` in `{0..=box_max}^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSample {
    pub m: usize,
    pub box_max: u32,
    pub inputs: Vec<Vec<u32>>,
    pub outputs: Vec<Vec<f64>>,
}

const SAMPLE_CHUNK: usize = 4096;

pub fn sample_positive_image(m: usize, count: usize, box_max: u32, seed: u64) -> Result<ProjectionSample> {
    if m < 2 {
        return Err(Error::InvalidArgument("projection sampling needs m >= 2".into()));
    }
    let p = build_transfer_matrix(m)?;
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let pairs: Vec<(Vec<u32>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            let p = &p;
            (0..len)
                .map(|_| {
                    let x: Vec<u32> = (0..m).map(|_| rng.gen_range(0..=box_max)).collect();
                    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
                    let y = p.apply(&xf).expect("dimension fixed by m");
                    (x, y)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let (inputs, outputs) = pairs.into_iter().unzip();
    Ok(ProjectionSample {
        m,
        box_max,
        inputs,
        outputs,
    })
}

/// One occupied heatmap cell of a pairwise coordinate projection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionCell {
    /// `"X<i>-X<j>"`, 1-based.
    pub pair: String,
    pub xi: f64,
    pub xj: f64,
    pub weight: u64,
}

/// Bins every pairwise projection `(X_i, X_j)`, `i < j`, into a `bins x bins`
/// grid spanning `[0, max]` on each axis. Cells report bin centres.
pub fn projection_histogram(sample: &ProjectionSample, bins: usize) -> Vec<ProjectionCell> {
    let bins = bins.max(1);
    let m = sample.m;
    let axis_max: Vec<f64> = (0..m)
        .map(|i| {
            sample
                .outputs
                .iter()
                .map(|y| y[i])
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE)
        })
        .collect();
    let bin_of = |v: f64, i: usize| (((v / axis_max[i]) * bins as f64) as usize).min(bins - 1);
    let centre = |b: usize, i: usize| (b as f64 + 0.5) * axis_max[i] / bins as f64;
    let mut cells = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let mut grid = vec![0u64; bins * bins];
            for y in &sample.outputs {
                grid[bin_of(y[i], i) * bins + bin_of(y[j], j)] += 1;
            }
            for (idx, &w) in grid.iter().enumerate() {
                if w > 0 {
                    cells.push(ProjectionCell {
                        pair: format!("X{}-X{}", i + 1, j + 1),
                        xi: centre(idx / bins, i),
                        xj: centre(idx % bins, j),
                        weight: w,
                    });
                }
            }
        }
    }
    cells
}
