//! Exact inverse of the transfer matrix and shifted Chung-Lu inputs.
//!
//! `P^-1 = B^-1 V^-1 A^-1` is never formed as one matrix. `A^-1` scales by
//! `i!`, `V^-1` is applied with exact integer coefficients from its
//! combinatorial closed form, and `B^-1` scales by `e^k / k` at the working
//! precision. Everything in between is accumulated exactly and rounded once.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::distributions::DegreeDistribution;
use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, Real};

/// Unsigned Stirling number of the first kind `c(n, k)`: permutations of
/// `n` elements with exactly `k` cycles. Zero when `k > n`.
pub fn stirling_first_unsigned(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    StirlingTriangle::new(n).get(n, k).clone()
}

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Rows `0..=n` of `c(n, k) = c(n-1, k-1) + (n-1) c(n-1, k)`.
#[derive(Debug, Clone)]
pub struct StirlingTriangle {
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTriangle {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
        rows.push(vec![BigUint::one()]);
        for row in 1..=n {
            let prev = &rows[row - 1];
            let next: Vec<BigUint> = (0..=row)
                .map(|k| {
                    let left = if k >= 1 { prev[k - 1].clone() } else { BigUint::zero() };
                    let right = prev.get(k).map(|v| v * (row - 1)).unwrap_or_default();
                    left + right
                })
                .collect();
            rows.push(next);
        }
        Self { rows }
    }

    pub fn get(&self, n: usize, k: usize) -> &BigUint {
        &self.rows[n][k]
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Exact inverse of `V[i][k] = k^(i-1)`, `i, k = 1..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactVandermondeInverse {
    m: usize,
    /// `(m-1)! * V^-1`, row-major. Every entry is an integer.
    scaled: Vec<BigInt>,
    denominator: BigInt,
}

impl ExactVandermondeInverse {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Entry `(i, j)`, 1-based, as a reduced rational.
    pub fn get(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.scaled[(i - 1) * self.m + (j - 1)].clone(), self.denominator.clone())
    }

    pub fn entries(&self) -> Vec<Vec<BigRational>> {
        (1..=self.m)
            .map(|i| (1..=self.m).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Integer matrix `W` and `d = (m-1)!` with `V^-1 = W / d`.
    pub fn scaled(&self) -> (&[BigInt], &BigInt) {
        (&self.scaled, &self.denominator)
    }

    /// `V * W == d * I` in exact integer arithmetic.
    pub fn is_exact_inverse(&self) -> bool {
        let m = self.m;
        for i in 1..=m {
            // Row i of V is (k^(i-1))_k.
            let powers: Vec<BigInt> = (1..=m).map(|k| num_traits::pow(BigInt::from(k), i - 1)).collect();
            for j in 1..=m {
                let s: BigInt = (1..=m)
                    .map(|k| &powers[k - 1] * &self.scaled[(k - 1) * m + (j - 1)])
                    .sum();
                let want = if i == j { self.denominator.clone() } else { BigInt::zero() };
                if s != want {
                    return false;
                }
            }
        }
        true
    }
}

/// Closed form `(-1)^(i+j) sum_{k=max(i,j)}^{m} C(k-1, i-1) c(k, j) / (k-1)!`.
pub fn vandermonde_inverse(m: usize) -> Result<ExactVandermondeInverse> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let stirling = StirlingTriangle::new(m);
    let denominator = factorial(m - 1);
    // (m-1)! / (k-1)! for k = 1..m.
    let weight: Vec<BigUint> = (1..=m)
        .map(|k| ((k)..m).fold(BigUint::one(), |acc, t| acc * t))
        .collect();
    let mut scaled = Vec::with_capacity(m * m);
    for i in 1..=m {
        for j in 1..=m {
            let magnitude: BigUint = (i.max(j)..=m)
                .map(|k| &weight[k - 1] * binomial(k - 1, i - 1) * stirling.get(k, j))
                .sum();
            let value = BigInt::from(magnitude);
            scaled.push(if (i + j) % 2 == 0 { value } else { -value });
        }
    }
    Ok(ExactVandermondeInverse {
        m,
        scaled,
        denominator: BigInt::from(denominator),
    })
}

/// Elementwise nearest integer, ties away from zero.
pub fn round_int(x: &[Real]) -> Vec<BigInt> {
    x.iter().map(Real::round_to_integer).collect()
}

/// Outcome of shifting a desired output `y` back to a Chung-Lu input.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftResult {
    pub m: usize,
    pub digits: u32,
    /// `P^-1 y` at working precision.
    pub x_real: Vec<Real>,
    #[serde(serialize_with = "serialize_bigints")]
    pub x_rounded: Vec<BigInt>,
    /// No entry of `x_real` is below `-tolerance`.
    pub feasible: bool,
    pub tolerance: Real,
    /// 1-based classes whose `x_real` entry is below `-tolerance`.
    pub negative_classes: Vec<usize>,
    /// `P x_rounded` at working precision.
    pub predicted_back: Vec<Real>,
    /// `||y - P x_rounded||_1`.
    pub rounding_residual: Real,
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl ShiftResult {
    /// The rounded input as a distribution; fails if the shift is infeasible.
    pub fn rounded_distribution(&self) -> Result<DegreeDistribution> {
        if !self.feasible {
            return Err(Error::InvalidArgument(format!(
                "shifted input is infeasible: negative entries in classes {:?}",
                self.negative_classes
            )));
        }
        let counts = self
            .x_rounded
            .iter()
            .map(|v| {
                // Entries within the tolerance of zero may round to -0.
                let f = Real::from_int(v.clone()).to_f64();
                f.max(0.0)
            })
            .collect();
        DegreeDistribution::new(counts)
    }

    pub fn x_real_f64(&self) -> Vec<f64> {
        self.x_real.iter().map(Real::to_f64).collect()
    }
}

/// Cached factors of `P` and `P^-1` for one dimension and precision.
#[derive(Debug, Clone)]
pub struct ExactInverse {
    m: usize,
    ctx: PrecisionContext,
    vinv: ExactVandermondeInverse,
    factorials: Vec<BigInt>,
    /// `e^k / k`.
    b_inv: Vec<Real>,
    /// `P[i][k]` rounded to working precision, row-major.
    p: Vec<Real>,
}

impl ExactInverse {
    /// # Panics
    /// Panics if the closed-form inverse fails the exact identity check.
    pub fn new(m: usize, ctx: PrecisionContext) -> Result<Self> {
        let vinv = vandermonde_inverse(m)?;
        assert!(
            vinv.is_exact_inverse(),
            "Vandermonde closed form does not invert V for m = {m}"
        );
        let digits = ctx.digits();
        let factorials: Vec<BigInt> = (1..=m).map(|i| BigInt::from(factorial(i))).collect();
        let exp_pos = ctx.exp_table(m as u32);
        let b_inv = exp_pos
            .iter()
            .enumerate()
            .map(|(k, e)| e.div(&Real::from_int(k as i64 + 1), digits))
            .collect();
        let exp_neg: Vec<Real> = exp_pos.iter().map(|e| Real::one().div(e, digits + 12)).collect();
        let mut p = Vec::with_capacity(m * m);
        for i in 1..=m {
            let fact = Real::from_int(factorials[i - 1].clone());
            for (k, en) in exp_neg.iter().enumerate() {
                let power = num_traits::pow(BigInt::from(k + 1), i);
                p.push((en * &power).div(&fact, digits));
            }
        }
        Ok(Self {
            m,
            ctx,
            vinv,
            factorials,
            b_inv,
            p,
        })
    }

    /// Uses [`PrecisionContext::for_dimension`].
    pub fn with_default_precision(m: usize) -> Result<Self> {
        Self::new(m, PrecisionContext::for_dimension(m))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn vandermonde_inverse(&self) -> &ExactVandermondeInverse {
        &self.vinv
    }

    pub fn p_entry(&self, i: usize, k: usize) -> &Real {
        &self.p[(i - 1) * self.m + (k - 1)]
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: len,
            });
        }
        Ok(())
    }

    /// `P x` at working precision.
    pub fn forward(&self, x: &[Real]) -> Result<Vec<Real>> {
        self.check_len(x.len())?;
        let digits = self.ctx.digits();
        Ok(self
            .p
            .chunks_exact(self.m)
            .map(|row| Real::dot(row, x).round(digits))
            .collect())
    }

    /// `P^T w` at working precision.
    pub fn forward_transpose(&self, w: &[Real]) -> Result<Vec<Real>> {
        self.check_len(w.len())?;
        let digits = self.ctx.digits();
        Ok((1..=self.m)
            .map(|k| {
                (1..=self.m)
                    .fold(Real::zero(), |acc, i| &acc + &(self.p_entry(i, k) * &w[i - 1]))
                    .round(digits)
            })
            .collect())
    }

    /// `P^-1 y = B^-1 (V^-1 (A^-1 y))`, staged right to left.
    pub fn apply_inverse(&self, y: &[Real]) -> Result<Vec<Real>> {
        self.check_len(y.len())?;
        let digits = self.ctx.digits();
        let (w, d) = self.vinv.scaled();
        let d = Real::from_int(d.clone());
        let z: Vec<Real> = y
            .iter()
            .zip(&self.factorials)
            .map(|(v, f)| v * f)
            .collect();
        Ok((0..self.m)
            .map(|k| {
                let row = &w[k * self.m..(k + 1) * self.m];
                let u = row
                    .iter()
                    .zip(&z)
                    .fold(Real::zero(), |acc, (c, v)| &acc + &(v * c));
                (&u * &self.b_inv[k]).div(&d, digits)
            })
            .collect())
    }

    /// `(P^-1)^T v = A^-1 (V^-T (B^-1 v))`.
    pub fn apply_inverse_transpose(&self, v: &[Real]) -> Result<Vec<Real>> {
        self.check_len(v.len())?;
        let digits = self.ctx.digits();
        let (w, d) = self.vinv.scaled();
        let d = Real::from_int(d.clone());
        let t: Vec<Real> = v.iter().zip(&self.b_inv).map(|(a, b)| a * b).collect();
        Ok((0..self.m)
            .map(|j| {
                let s = (0..self.m).fold(Real::zero(), |acc, k| &acc + &(&t[k] * &w[k * self.m + j]));
                (&s * &self.factorials[j]).div(&d, digits)
            })
            .collect())
    }

    /// `P^-1` as one dense matrix, each entry rounded to working precision.
    /// Debugging aid; [`apply_inverse`](Self::apply_inverse) is more accurate.
    pub fn materialize(&self) -> Vec<Vec<Real>> {
        let digits = self.ctx.digits();
        let (w, d) = self.vinv.scaled();
        let d = Real::from_int(d.clone());
        (0..self.m)
            .map(|k| {
                (0..self.m)
                    .map(|i| {
                        let c = &(&self.b_inv[k] * &w[k * self.m + i]) * &self.factorials[i];
                        c.div(&d, digits)
                    })
                    .collect()
            })
            .collect()
    }

    /// `P^-1 y` through the materialized matrix.
    pub fn apply_materialized(&self, y: &[Real]) -> Result<Vec<Real>> {
        self.check_len(y.len())?;
        let digits = self.ctx.digits();
        Ok(self
            .materialize()
            .iter()
            .map(|row| Real::dot(row, y).round(digits))
            .collect())
    }

    /// Largest column sum of `P` at working precision.
    pub fn one_norm(&self) -> Real {
        (1..=self.m)
            .map(|k| (1..=self.m).map(|i| self.p_entry(i, k)).sum::<Real>())
            .max()
            .unwrap_or_else(Real::zero)
    }

    pub fn shift(&self, y: &[Real]) -> Result<ShiftResult> {
        self.shift_with(y, false)
    }

    /// Like [`shift`](Self::shift); `materialize` routes through the dense inverse.
    pub fn shift_with(&self, y: &[Real], materialize: bool) -> Result<ShiftResult> {
        let x_real = if materialize {
            self.apply_materialized(y)?
        } else {
            self.apply_inverse(y)?
        };
        let tolerance = self.ctx.feasibility_tolerance();
        let neg_tol = -&tolerance;
        let negative_classes: Vec<usize> = x_real
            .iter()
            .enumerate()
            .filter(|(_, v)| **v < neg_tol)
            .map(|(i, _)| i + 1)
            .collect();
        let x_rounded = round_int(&x_real);
        let as_real: Vec<Real> = x_rounded.iter().map(Real::from).collect();
        let predicted_back = self.forward(&as_real)?;
        let rounding_residual = y
            .iter()
            .zip(&predicted_back)
            .map(|(a, b)| (a - b).abs())
            .sum::<Real>()
            .round(self.ctx.digits());
        Ok(ShiftResult {
            m: self.m,
            digits: self.ctx.digits(),
            x_real,
            x_rounded,
            feasible: negative_classes.is_empty(),
            tolerance,
            negative_classes,
            predicted_back,
            rounding_residual,
        })
    }
}

/// Converts each count to its shortest decimal representation.
pub fn distribution_to_reals(y: &DegreeDistribution) -> Vec<Real> {
    y.counts().iter().map(|&c| Real::from_f64(c)).collect()
}

/// Shifted input for the target `y`: builds the factors for `y.m()` and applies them.
pub fn shift_input(y: &DegreeDistribution, ctx: PrecisionContext) -> Result<ShiftResult> {
    ExactInverse::new(y.m(), ctx)?.shift(&distribution_to_reals(y))
}
