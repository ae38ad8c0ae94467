//! Scalar abstraction shared by the matrix kernels.
//!
//! Everything that only needs field arithmetic and an order is written
//! against [`Scalar`], so the same code runs on `f64` for quick
//! experiments and on [`Rational`](crate::Rational) wherever a decision
//! has to be exact. Operations that need floors or parity (odd
//! approximation, label construction) are concrete over `Rational`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Ordered field element usable by [`Matrix`](crate::Matrix) and the
/// projective / finite-difference routines.
pub trait Scalar: Clone + fmt::Debug + PartialOrd + Num + Signed + FromPrimitive {
    /// Lossy conversion used only for display.
    fn to_display_f64(&self) -> f64;

    fn is_positive_strict(&self) -> bool {
        *self > Self::zero()
    }

    fn is_nonnegative(&self) -> bool {
        *self >= Self::zero()
    }
}

impl Scalar for f64 {
    fn to_display_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn to_display_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn to_display_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Returned when a string is not a decimal or `p/q` rational.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

fn parse_err(literal: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError { literal: literal.to_string(), reason }
}

/// Parses `"7"`, `"-7"`, `"7/22"`, `"0.125"` or `"-1.5"` into an exact rational.
pub fn parse_rational(literal: &str) -> Result<BigRational, ParseRationalError> {
    let s = literal.trim();
    if s.is_empty() {
        return Err(parse_err(literal, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(|| parse_err(literal, "bad numerator"))?;
        let den = parse_integer(den.trim()).ok_or_else(|| parse_err(literal, "bad denominator"))?;
        if den.is_zero() {
            return Err(parse_err(literal, "zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits = int_part.trim_start_matches(['-', '+']);
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(literal, "bad fractional part"));
        }
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(literal, "bad integer part"));
        }
        let whole = if digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(digits).map_err(|_| parse_err(literal, "bad integer part"))?
        };
        let frac = BigInt::from_str(frac_part).map_err(|_| parse_err(literal, "bad fractional part"))?;
        let scale = num_traits::pow(BigInt::from(10u32), frac_part.len());
        let magnitude = BigRational::new(whole * &scale + frac, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    parse_integer(s).map(BigRational::from_integer).ok_or_else(|| parse_err(literal, "not an integer, decimal or p/q"))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.trim_start_matches('+')).ok()
}

/// Canonical `p/q` text (`p` alone for integers), the inverse of [`parse_rational`].
pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

/// `1 / 10^k` as an exact rational.
pub fn ten_pow_neg(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10u32), k as usize))
}

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
