//! Exact rational values and their text/JSON representations.
//!
//! Every value the solver touches (item values, thresholds, MMS values,
//! ratios) is a [`Rational`] in canonical reduced form. Text form is the
//! canonical `p/q` string, with plain integers written bare. Decimal strings
//! like `"0.25"` convert exactly on input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::InputError;

pub type Rational = BigRational;

/// Shorthand for small rational constants, e.g. `rat(4, 5)`.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: `p/q`, or bare `p` when the value is an integer.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` fractions, bare integers, and decimal strings, all exactly.
pub fn parse_rational(s: &str) -> Result<Rational, InputError> {
    let s = s.trim();
    let bad = || InputError::BadRational(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_part = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let numer = int_part.abs() * &scale + frac;
        let numer = if negative { -numer } else { numer };
        return Ok(Rational::new(numer, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// JSON form per the file schemas: integer values as bare JSON integers,
/// everything else as a `p/q` (or decimal) string.
pub fn rational_to_json(r: &Rational) -> Value {
    if r.denom().is_one() {
        if let Ok(i) = i64::try_from(r.numer().clone()) {
            return Value::from(i);
        }
    }
    Value::String(format_rational(r))
}

pub fn rational_from_json(v: &Value) -> Result<Rational, InputError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rat_int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from_integer(BigInt::from(u)))
            } else {
                // Floats are rejected: they cannot round-trip exactly.
                Err(InputError::BadRational(n.to_string()))
            }
        }
        Value::String(s) => parse_rational(s),
        other => Err(InputError::BadRational(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "4/5", "16/21", "-3/8", "0"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn decimal_strings_convert_exactly() {
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("1.5").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-0.04").unwrap(), rat(-1, 25));
        assert_eq!(parse_rational("20.").is_err(), true);
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
    }

    #[test]
    fn fractions_reduce_to_canonical_form() {
        let r = parse_rational("10/15").unwrap();
        assert_eq!(format_rational(&r), "2/3");
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn json_integers_stay_bare() {
        assert_eq!(rational_to_json(&rat_int(12)), Value::from(12));
        assert_eq!(
            rational_to_json(&rat(4, 5)),
            Value::String("4/5".to_string())
        );
        assert_eq!(rational_from_json(&Value::from(7)).unwrap(), rat_int(7));
        assert!(rational_from_json(&Value::from(0.5)).is_err());
    }

    #[test]
    fn exactness_add_sub_cancels() {
        let a = rat(16, 21);
        let b = rat(7, 13);
        assert_eq!(&(&a + &b) - &b, a);
    }
}
