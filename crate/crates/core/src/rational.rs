//! Exact rational time values.
//!
//! Every delay, timestamp, and clock value in this crate is an exact
//! rational. Floating point never enters the arithmetic, so delay sums and
//! timestamp comparisons are decided exactly.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use thiserror::Error;

/// Exact rational number used for all time quantities.
pub type Rational = BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `p/q`. Panics if `q == 0`.
pub fn ratio(p: u64, q: u64) -> Rational {
    assert!(q != 0, "zero denominator");
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Error raised by [`parse_rational`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational literal `{0}`")]
pub struct RationalParseError(pub String);

/// Parses a non-negative rational literal: `7`, `3/2`, or `1.5`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let bad = || RationalParseError(text.to_string());
    if let Some((num_part, den_part)) = text.split_once('/') {
        let p: BigInt = num_part.trim().parse().map_err(|_| bad())?;
        let q: BigInt = den_part.trim().parse().map_err(|_| bad())?;
        if q.is_zero() || p.sign() == num::bigint::Sign::Minus || q.sign() == num::bigint::Sign::Minus {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: BigInt = if int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        if int.sign() == num::bigint::Sign::Minus {
            return Err(bad());
        }
        let mut scale = BigInt::one();
        for _ in 0..frac_part.len() {
            scale *= 10;
        }
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        return Ok(Rational::new(int * &scale + frac, scale));
    }
    let n: BigInt = text.trim().parse().map_err(|_| bad())?;
    if n.sign() == num::bigint::Sign::Minus {
        return Err(bad());
    }
    Ok(Rational::from_integer(n))
}

/// Renders a rational as `p/q`, or as a bare integer when the denominator
/// is one. This is the canonical form used by every serializer in the crate.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
