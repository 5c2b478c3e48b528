//! Exact rational arithmetic helpers.
//!
//! All quantities in this crate are arbitrary-precision rationals
//! ([`num_rational::BigRational`]); nothing is ever rounded. This module
//! provides the crate-wide type aliases plus parsing and formatting that are
//! stable byte for byte: a rational always renders in lowest terms as `p` for
//! integers and `p/q` otherwise, and the parser accepts exactly those forms
//! plus decimal literals, which are converted exactly (`0.3` is 3/10, not the
//! nearest double).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational number; the scalar type used throughout the crate.
pub type Ratio = num_rational::BigRational;

/// Weights attached to labels are plain [`Ratio`] values.
///
/// Range invariants (nonnegative, totals bounded by one) are enforced where
/// they are meaningful — at the boundaries of
/// [`SourceElement`](crate::weights::SourceElement) and the matrix types —
/// rather than on every intermediate value, so prefix sums and hull slopes
/// can be computed without ceremony.
pub type Weight = Ratio;

/// Builds a ratio from machine integers. Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Ratio {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Parses an exact rational from `p`, `p/q`, or a decimal literal.
///
/// Accepted forms, with optional leading `-`:
///
/// * integers: `3`, `-12`
/// * fractions in any terms: `3/10`, `6/20`
/// * decimal literals, converted exactly: `0.25` = 1/4, `1.5` = 3/2
///
/// ```
/// use privnet_core::ratio::{parse_ratio, ratio};
/// assert_eq!(parse_ratio("0.3").unwrap(), ratio(3, 10));
/// assert_eq!(parse_ratio("6/20").unwrap(), ratio(3, 10));
/// ```
pub fn parse_ratio(input: &str) -> Result<Ratio, Error> {
    let s = input.trim();
    let err = || Error::Parse {
        detail: format!("not a rational literal: {input:?}"),
    };
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(Error::Parse {
                detail: format!("zero denominator: {input:?}"),
            });
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_part = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err())?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits: BigInt = frac_part.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
        let frac = Ratio::new(digits, scale);
        let int = Ratio::from_integer(int_part);
        return Ok(if negative { int - frac } else { int + frac });
    }
    let int: BigInt = s.parse().map_err(|_| err())?;
    Ok(Ratio::from_integer(int))
}

/// Renders a ratio canonically: lowest terms, `p` when integral, else `p/q`.
pub fn format_ratio(r: &Ratio) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when `r` lies in the closed unit interval.
pub fn in_unit_interval(r: &Ratio) -> bool {
    !r.is_negative() && *r <= Ratio::one()
}
