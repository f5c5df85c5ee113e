//! Exact rational arithmetic helpers.
//!
//! Every payoff and discount factor in this crate is a [`Rat`]. The backing
//! type keeps itself in lowest terms with a positive denominator, and all
//! arithmetic is exact; nothing here ever rounds. Decimal output exists only
//! for display and is marked approximate.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always canonical (gcd-reduced, positive
/// denominator).
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"p/q"` or a plain integer string.
pub fn parse_rat(text: &str) -> Result<Rat, RatParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(RatParseError::Empty);
    }
    let invalid = || RatParseError::Invalid(trimmed.to_string());
    match trimmed.split_once('/') {
        None => {
            let n: BigInt = trimmed.parse().map_err(|_| invalid())?;
            Ok(Rat::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| invalid())?;
            let d: BigInt = den.trim().parse().map_err(|_| invalid())?;
            if d.is_zero() {
                return Err(RatParseError::ZeroDenominator(trimmed.to_string()));
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// Exact rendering: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rational from an integer pair. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Truncated decimal rendering with `sig` significant digits, suffixed `~`
/// to mark it approximate. Display only; never feeds back into computation.
pub fn approx_decimal(r: &Rat, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if r.is_zero() {
        return "0~".to_string();
    }
    let mut out = String::new();
    if r.is_negative() {
        out.push('-');
    }
    let p = r.numer().abs();
    let q = r.denom().clone();
    let int_part = &p / &q;
    let mut rem = &p % &q;
    let int_str = int_part.to_string();
    let mut significant = if int_part.is_zero() { 0 } else { int_str.len() };
    out.push_str(&int_str);
    out.push('.');
    let ten = BigInt::from(10);
    let mut emitted = 0usize;
    // Leading fractional zeros are not significant; cap them so pathological
    // magnitudes still terminate.
    while significant < sig && emitted < sig + 64 {
        rem *= &ten;
        let digit = &rem / &q;
        rem %= &q;
        out.push_str(&digit.to_string());
        emitted += 1;
        if significant > 0 || !digit.is_zero() {
            significant += 1;
        }
    }
    out.push('~');
    out
}
