//! Text forms of exact rationals: `"num/den"` strings and fixed-precision
//! scientific decimals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Significant digits used for decimal renderings of rationals.
pub const RATIONAL_DIGITS: usize = 30;

/// `"num/den"`, always with the denominator (`"1/1"`, `"-3/4"`, `"0/1"`).
pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::OutOfRange { what: "rational", value: s.to_string(), reason: "expected \"num/den\"" };
    let (n, d) = s.split_once('/').ok_or_else(bad)?;
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Scientific notation with `digits` significant digits, rounded half away
/// from zero: `-7.50000e-1` for `-3/4` at six digits.
pub fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    assert!(digits > 0);
    if r.is_zero() {
        return format!("{}e0", pad_mantissa("0", digits));
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let ten = BigInt::from(10);
    let lower = ten.pow(digits as u32 - 1);
    let upper = ten.pow(digits as u32);

    // estimate the decimal exponent from the digit counts, then correct
    let mut exp = num.to_string().len() as i64 - den.to_string().len() as i64;
    let scaled = |exp: i64| -> BigInt {
        let shift = digits as i64 - 1 - exp;
        let (n, d) = if shift >= 0 {
            (&num * ten.pow(shift as u32), den.clone())
        } else {
            (num.clone(), &den * ten.pow((-shift) as u32))
        };
        let (q, rem) = n.div_rem(&d);
        if rem * 2 >= d {
            q + 1
        } else {
            q
        }
    };
    let mut m = scaled(exp);
    while m < lower {
        exp -= 1;
        m = scaled(exp);
    }
    while m >= upper {
        exp += 1;
        m = scaled(exp);
    }
    let s = m.to_string();
    let mantissa = pad_mantissa(&s, digits);
    format!("{}{}e{}", if neg { "-" } else { "" }, mantissa, exp)
}

fn pad_mantissa(s: &str, digits: usize) -> String {
    let mut out = String::with_capacity(digits + 1);
    out.push_str(&s[..1]);
    if digits > 1 {
        out.push('.');
        out.push_str(&s[1..]);
        for _ in s.len()..digits {
            out.push('0');
        }
    }
    out
}

/// Floats with 17 significant digits.
pub fn float_to_string(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serde adapter writing a rational as its `"num/den"` string.
pub mod serde_rational {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// [`serde_rational`] for sequences.
pub mod serde_rational_vec {
    use super::*;
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&rational_to_string(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}
