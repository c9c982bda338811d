//! Exact rational numbers.
//!
//! All coefficients, objective values and LP entries are [`Rational`]s, an
//! arbitrary-precision fraction kept in lowest terms with a positive
//! denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{FvxError, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn big(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p"` or `"p/q"` (optional sign, surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || FvxError::Domain(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// Parses a decimal literal such as `-1.25` or `3`, or falls back to `p/q`.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((whole, fractional)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), fractional);
        let p: BigInt = digits
            .parse()
            .map_err(|_| FvxError::Domain(format!("not a decimal: {s:?}")))?;
        let q = num_traits::pow(BigInt::from(10), fractional.len());
        let r = Rational::new(p, q);
        return Ok(if negative { -r } else { r });
    }
    parse_rational(s)
}

/// Canonical `p` or `p/q` rendering.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering when the expansion terminates, `p/q` otherwise.
pub fn format_decimal(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format_rational(r);
    }
    let digits = twos.max(fives);
    let scaled = r * big(num_traits::pow(BigInt::from(10), digits));
    let mag = scaled.numer().abs().to_string();
    let mag = format!("{:0>width$}", mag, width = digits + 1);
    let (w, f) = mag.split_at(mag.len() - digits);
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{w}.{f}")
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn dot(c: &[Rational], x: &[Rational]) -> Rational {
    c.iter()
        .zip(x)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}
