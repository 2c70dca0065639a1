//! Scalar field helpers over arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back for ratios whose parts overflow f64 individually
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses `"p"`, `"-p"` or `"p/q"` with integer `p`, `q`. Decimal points are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let valid = |t: &str, signed: bool| {
        let digits = if signed { t.strip_prefix(['-', '+']).unwrap_or(t) } else { t };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return Err(bad());
    }
    let n: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn pow_int(r: &Rational, k: i64) -> Rational {
    if k >= 0 {
        Pow::pow(r, k as u64)
    } else {
        Pow::pow(r.recip(), k.unsigned_abs())
    }
}

fn exact_int_root(v: &BigInt, q: u32) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let root = v.nth_root(q);
    (Pow::pow(&root, q) == *v).then_some(root)
}

/// `c^e` when it is an exact rational (positive base, or integer exponent).
pub fn pow_rational_exact(c: &Rational, e: &Rational) -> Option<Rational> {
    if e.is_integer() {
        let k = e.numer().to_i64()?;
        if c.is_zero() && k < 0 {
            return None;
        }
        return Some(pow_int(c, k));
    }
    if !c.is_positive() {
        return None;
    }
    let q = e.denom().to_u32()?;
    let n = exact_int_root(c.numer(), q)?;
    let d = exact_int_root(c.denom(), q)?;
    let k = e.numer().to_i64()?;
    Some(pow_int(&Rational::new(n, d), k))
}

pub fn floor(r: &Rational) -> Rational {
    r.floor()
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

pub fn is_nonneg_integer(r: &Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-4/6").unwrap(), ratio(-2, 3));
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert_eq!(parse_rational(" +1 ").unwrap(), rat(1));
    }

    #[test]
    fn rejects_decimals_and_junk() {
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn canonical_formatting() {
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&rat(5)), "5");
    }

    #[test]
    fn exact_roots() {
        assert_eq!(pow_rational_exact(&ratio(4, 9), &ratio(1, 2)), Some(ratio(2, 3)));
        assert_eq!(pow_rational_exact(&rat(8), &ratio(-2, 3)), Some(ratio(1, 4)));
        assert_eq!(pow_rational_exact(&rat(3), &ratio(1, 2)), None);
        assert_eq!(pow_rational_exact(&rat(-3), &rat(2)), Some(rat(9)));
        assert_eq!(pow_rational_exact(&rat(0), &rat(-1)), None);
    }

    #[test]
    fn fractional_part_is_in_unit_interval() {
        assert_eq!(frac(&ratio(-1, 2)), ratio(1, 2));
        assert_eq!(frac(&ratio(7, 3)), ratio(1, 3));
        assert_eq!(frac(&rat(-2)), rat(0));
    }
}
