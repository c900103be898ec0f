//! Exact rationals and their textual form `p/q` or `p`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn factorial(k: usize) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, i| acc * int(i))
}

/// `(-1)^k` as a rational.
pub fn sign(negative: bool) -> Rational {
    if negative {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Canonical text: `"p"` for integers, `"p/q"` otherwise, lowest terms, `q > 0`.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"` with an optional leading minus sign. No decimals.
pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::Invalid(format!("malformed rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let unsigned = num.strip_prefix('-').unwrap_or(num);
    if !digits(unsigned) {
        return Err(bad());
    }
    let numer: BigInt = num.parse().map_err(|_| bad())?;
    let denom: BigInt = match den {
        Some(d) if digits(d) => d.parse().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(Error::Invalid(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(numer, denom))
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in ["0", "7", "-3", "3/4", "-1/2"] {
            assert_eq!(format(&parse(s).unwrap()), s);
        }
        assert_eq!(format(&parse("6/4").unwrap()), "3/2");
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "1.5", "1/", "/2", "a", "1/0", "--1", "1/-2"] {
            assert!(parse(s).is_err(), "{s}");
        }
    }
}
