//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"-p/q"` or an integer. Decimal notation is rejected so
/// that no input is ever rounded.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("`{text}` is not an exact rational (expected p/q or an integer)"));
    if s.is_empty() || s.contains(['.', 'e', 'E']) {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("`{text}` has a zero denominator")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `p/q` text (`q` omitted when 1).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| num_integer::Integer::lcm(&acc, r.denom()))
}
