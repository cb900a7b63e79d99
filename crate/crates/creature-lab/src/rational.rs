//! Exact rational helpers.
//!
//! Every quantity in the workbench (norms, valuations, measures,
//! thresholds) is an arbitrary-precision rational. Floating point is never
//! used; the inequalities we decide involve terms like 2^(-2^k) where
//! rounding destroys correctness.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from(BigInt::from(n))
}

/// 2^e for e >= 0.
pub fn pow2(e: u64) -> Rational {
    BigRational::from(BigInt::from(BigUint::one() << e))
}

/// 2^-e for e >= 0.
pub fn pow2_neg(e: u64) -> Rational {
    pow2(e).recip()
}

/// 2^(-2^k), the splitting threshold at level k.
pub fn beta_threshold(level: usize) -> Rational {
    pow2_neg(1u64 << level)
}

/// 2^(-2^(k+1)), the floor a special candidate must clear at a length-k node.
pub fn special_floor(len: usize) -> Rational {
    pow2_neg(1u64 << (len + 1))
}

/// 2^(1-2^l), the default amalgamation schedule.
pub fn default_schedule(level: usize) -> Rational {
    pow2(1) * pow2_neg(1u64 << level)
}

pub fn is_unit(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

pub fn check_unit(r: &Rational, what: &str) -> Result<()> {
    if !is_unit(r) {
        return Err(Error::input(format!("{what} = {} lies outside [0,1]", fmt_rat(r))));
    }
    Ok(())
}

/// Renders `p/q` in lowest terms; integers render without the `/q`.
pub fn fmt_rat(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rat(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::input(format!("bad rational numerator in {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::input(format!("bad rational denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::input(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_are_exact() {
        assert_eq!(beta_threshold(0), rat(1, 2));
        assert_eq!(beta_threshold(2), rat(1, 16));
        assert_eq!(special_floor(2), rat(1, 256));
        assert_eq!(default_schedule(1), rat(1, 2));
        assert_eq!(default_schedule(3), rat(1, 128));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "0", "1", "7/16", "-2/5"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(fmt_rat(&r), s);
        }
        assert_eq!(fmt_rat(&parse_rat("6/8").unwrap()), "3/4");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
