//! Arbitrary-precision rationals used for every bound and LP value.
//!
//! Backed by `num_rational::BigRational`, which keeps values in canonical
//! reduced form with a positive denominator. Helpers here cover the few
//! operations the rest of the crate needs: literals, `p/q` string I/O for
//! the JSON surfaces, and half-integrality tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_usize(n: usize) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_u64(n: u64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_u128(n: u128) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders as `p` for integers and `p/q` otherwise.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::InvalidInput(format!("bad rational component {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(num)?, den))
        }
    }
}

/// True when `r` is 0, 1/2 or 1.
pub fn is_half_integral_value(r: &Rat) -> bool {
    r.is_zero() || r.is_one() || *r == ratio(1, 2)
}

/// Approximate conversion for reporting only; bound checks stay exact.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Fall back to digit-limited division for very large components.
    let nf = num.to_string().parse::<f64>().unwrap_or(if num.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    });
    let df = den.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    nf / df
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for s in ["0", "7", "-3", "1/2", "-22/7"] {
            let r = rat_from_str(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
    }

    #[test]
    fn canonicalizes() {
        assert_eq!(rat_from_str("2/4").unwrap(), ratio(1, 2));
        assert_eq!(rat_to_string(&ratio(6, 3)), "2");
    }

    #[test]
    fn half_integral_detection() {
        assert!(is_half_integral_value(&rat(0)));
        assert!(is_half_integral_value(&ratio(1, 2)));
        assert!(is_half_integral_value(&rat(1)));
        assert!(!is_half_integral_value(&ratio(1, 3)));
        assert!(!is_half_integral_value(&rat(2)));
    }
}
