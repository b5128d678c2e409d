//! Decimal floating-point numbers with caller-controlled precision.
//!
//! A [`Real`] is `mantissa * 10^exponent` with an arbitrary-size integer
//! mantissa. Addition, subtraction and multiplication are exact; precision
//! is only lost where the caller asks for it through [`Real::round`] or
//! [`Real::div`]. Inner products can therefore be accumulated exactly and
//! rounded once, which matters for the heavy cancellation in the shifted
//! inverse.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Smallest precision accepted by [`PrecisionContext::new`].
pub const MIN_DIGITS: u32 = 50;

/// Extra digits carried while building constants such as `e`.
const GUARD_DIGITS: u32 = 12;

/// Number of significant decimal digits used for extended-precision work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrecisionContext {
    digits: u32,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least {MIN_DIGITS} digits, got {digits}"
            )));
        }
        Ok(Self { digits })
    }

    /// Default precision for an `m`-class system: `max(100, ceil(m log10 m) + 50)`.
    pub fn for_dimension(m: usize) -> Self {
        let m_f = m.max(1) as f64;
        let needed = (m_f * m_f.log10()).ceil() as u32 + 50;
        Self {
            digits: needed.max(100),
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `10^-(digits/2)`: entries of a shifted input above `-tolerance` count as non-negative.
    pub fn feasibility_tolerance(&self) -> Real {
        Real::pow10(-((self.digits / 2) as i64))
    }

    /// Euler's number to `digits` significant digits.
    ///
    /// Sums the Taylor series of `exp(1)` in fixed point with `GUARD_DIGITS`
    /// extra digits. Each truncated division loses less than one unit in the
    /// last place and the discarded tail is below two units, so the error
    /// before the final rounding is at most `(terms + 2) * 10^-(digits + guard)`.
    pub fn euler(&self) -> Real {
        let scale_digits = self.digits + GUARD_DIGITS;
        let scale = pow10_uint(scale_digits);
        let mut term = scale.clone();
        let mut sum = scale;
        let mut n = 1u32;
        loop {
            term /= n;
            if term.is_zero() {
                break;
            }
            sum += &term;
            n += 1;
        }
        Real::new(BigInt::from(sum), -(scale_digits as i64)).round(self.digits)
    }

    /// `[e^1, ..., e^m]`, each rounded to `digits`.
    pub fn exp_table(&self, m: u32) -> Vec<Real> {
        let working = self.digits + GUARD_DIGITS;
        let e = PrecisionContext { digits: working }.euler();
        let mut power = Real::one();
        (1..=m)
            .map(|_| {
                power = (&power * &e).round(working);
                power.round(self.digits)
            })
            .collect()
    }

    /// `e^k` by repeated squaring of [`euler`](Self::euler), rounded to `digits`.
    pub fn exp_int(&self, k: u32) -> Real {
        let working = self.digits + GUARD_DIGITS;
        let base = {
            let wide = PrecisionContext { digits: working };
            wide.euler()
        };
        let mut result = Real::one();
        let mut power = base;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = (&result * &power).round(working);
            }
            e >>= 1;
            if e > 0 {
                power = (&power * &power).round(working);
            }
        }
        result.round(self.digits)
    }
}

/// An arbitrary-precision decimal number `mantissa * 10^exponent`.
#[derive(Clone, Debug)]
pub struct Real {
    mantissa: BigInt,
    exponent: i64,
}

fn pow10_uint(n: u32) -> BigUint {
    num_traits::pow(BigUint::from(10u32), n as usize)
}

fn pow10_int(n: u64) -> BigInt {
    num_traits::pow(BigInt::from(10u32), n as usize)
}

fn decimal_len(n: &BigInt) -> u64 {
    if n.is_zero() {
        return 0;
    }
    n.magnitude().to_str_radix(10).len() as u64
}

impl Real {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        Self { mantissa, exponent }
    }

    pub fn zero() -> Self {
        Self::new(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Self::new(BigInt::one(), 0)
    }

    pub fn pow10(exponent: i64) -> Self {
        Self::new(BigInt::one(), exponent)
    }

    pub fn from_int(value: impl Into<BigInt>) -> Self {
        Self::new(value.into(), 0)
    }

    /// Shortest decimal that round-trips to `value`.
    ///
    /// # Panics
    /// Panics on NaN or infinite input.
    pub fn from_f64(value: f64) -> Self {
        assert!(value.is_finite(), "cannot convert {value} to Real");
        format!("{value:e}")
            .parse()
            .expect("f64 scientific formatting is always parseable")
    }

    /// Rounds an exact rational to `digits` significant digits.
    pub fn from_rational(value: &BigRational, digits: u32) -> Self {
        Real::from_int(value.numer().clone()).div(&Real::from_int(value.denom().clone()), digits)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self::new(self.mantissa.abs(), self.exponent)
    }

    /// Rounds to `digits` significant digits, ties away from zero.
    pub fn round(&self, digits: u32) -> Self {
        let len = decimal_len(&self.mantissa);
        if len <= digits as u64 {
            return self.clone();
        }
        let drop = len - digits as u64;
        let divisor = pow10_int(drop);
        let (q, r) = self.mantissa.div_rem(&divisor);
        let q = if r.abs() * 2u32 >= divisor {
            q + self.mantissa.signum()
        } else {
            q
        };
        Self::new(q, self.exponent + drop as i64)
    }

    /// `self / other` rounded to `digits` significant digits.
    ///
    /// # Panics
    /// Panics on division by zero.
    pub fn div(&self, other: &Real, digits: u32) -> Self {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Real::zero();
        }
        let shift = (digits as i64 + 2 + decimal_len(&other.mantissa) as i64
            - decimal_len(&self.mantissa) as i64)
            .max(0) as u64;
        let numerator = &self.mantissa * pow10_int(shift);
        let quotient = numerator / &other.mantissa;
        Self::new(quotient, self.exponent - other.exponent - shift as i64).round(digits)
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_integer(&self) -> BigInt {
        if self.exponent >= 0 {
            return &self.mantissa * pow10_int(self.exponent as u64);
        }
        let divisor = pow10_int(self.exponent.unsigned_abs());
        let (q, r) = self.mantissa.div_rem(&divisor);
        if r.abs() * 2u32 >= divisor {
            q + self.mantissa.signum()
        } else {
            q
        }
    }

    /// Nearest `f64` (correctly rounded by the standard parser).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        format!("{}e{}", self.mantissa, self.exponent)
            .parse()
            .unwrap_or(f64::NAN)
    }

    /// Exact sum of products `sum a_i * b_i`.
    pub fn dot<'a>(a: impl IntoIterator<Item = &'a Real>, b: impl IntoIterator<Item = &'a Real>) -> Real {
        a.into_iter()
            .zip(b)
            .fold(Real::zero(), |acc, (x, y)| &acc + &(x * y))
    }

    /// Scientific notation with at most `digits` significant digits.
    pub fn to_sci_string(&self, digits: u32) -> String {
        self.round(digits).to_string()
    }

    fn aligned(&self, other: &Real) -> (BigInt, BigInt, i64) {
        let exp = self.exponent.min(other.exponent);
        let a = if self.exponent > exp {
            &self.mantissa * pow10_int((self.exponent - exp) as u64)
        } else {
            self.mantissa.clone()
        };
        let b = if other.exponent > exp {
            &other.mantissa * pow10_int((other.exponent - exp) as u64)
        } else {
            other.mantissa.clone()
        };
        (a, b, exp)
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let (a, b, exp) = self.aligned(rhs);
        Real::new(a + b, exp)
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        self + &(-rhs)
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        Real::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Mul<&BigInt> for &Real {
    type Output = Real;
    fn mul(self, rhs: &BigInt) -> Real {
        Real::new(&self.mantissa * rhs, self.exponent)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::new(-&self.mantissa, self.exponent)
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        &self + &rhs
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        &self - &rhs
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        &self * &rhs
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> std::iter::Sum<&'a Real> for Real {
    fn sum<I: Iterator<Item = &'a Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |acc, x| &acc + x)
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mantissa.sign(), other.mantissa.sign()) {
            (a, b) if a != b => sign_rank(a).cmp(&sign_rank(b)),
            _ => {
                let (a, b, _) = self.aligned(other);
                a.cmp(&b)
            }
        }
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl From<i64> for Real {
    fn from(v: i64) -> Self {
        Real::from_int(v)
    }
}

impl From<&BigInt> for Real {
    fn from(v: &BigInt) -> Self {
        Real::from_int(v.clone())
    }
}

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("not a decimal number: {s:?}"));
        let s = s.trim();
        let (body, exp) = match s.find(['e', 'E']) {
            Some(pos) => (
                &s[..pos],
                s[pos + 1..].parse::<i64>().map_err(|_| bad())?,
            ),
            None => (s, 0),
        };
        let (negative, body) = match body.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, body.strip_prefix('+').unwrap_or(body)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let digits: String = [int_part, frac_part].concat();
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mut mantissa = BigInt::from_str(&digits).map_err(|_| bad())?;
        if negative {
            mantissa = -mantissa;
        }
        Ok(Real::new(mantissa, exp - frac_part.len() as i64))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let digits = self.mantissa.magnitude().to_str_radix(10);
        let trimmed = digits.trim_end_matches('0');
        let lead_exp = self.exponent + digits.len() as i64 - 1;
        let sign = if self.is_negative() { "-" } else { "" };
        let (head, tail) = trimmed.split_at(1);
        if tail.is_empty() {
            write!(f, "{sign}{head}e{lead_exp}")
        } else {
            write!(f, "{sign}{head}.{tail}e{lead_exp}")
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl ToPrimitive for Real {
    fn to_i64(&self) -> Option<i64> {
        self.round_to_integer().to_i64()
    }

    fn to_u64(&self) -> Option<u64> {
        self.round_to_integer().to_u64()
    }

    fn to_f64(&self) -> Option<f64> {
        Some(Real::to_f64(self))
    }
}
