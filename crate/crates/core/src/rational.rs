//! Exact rational coefficients and their textual forms.
//!
//! Coefficients are written either as terminating decimals (`5700.000002`,
//! `1e-3`) or as fractions (`57/10`). Formatting prefers the decimal form
//! whenever it is exact, so every value survives a write/read cycle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// `num / den` as an exact rational.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as an exact rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // only reachable for magnitudes outside the f64 range
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Parse `p/q`, an integer, or a decimal with optional exponent.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::parse("empty number"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::parse(format!("zero denominator in `{s}`")));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::parse(format!("bad exponent in `{s}`")))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::parse(format!("not a number: `{s}`")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::parse(format!("not a number: `{s}`")));
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| Error::parse(format!("not a number: `{s}`")))?
    };
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let value = if scale >= 0 {
        Q::from_integer(num * pow10(scale as u32))
    } else {
        Q::new(num, pow10((-scale) as u32))
    };
    Ok(value)
}

/// Canonical text: exact decimal when the denominator is `2^a 5^b`, else `p/q`.
pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    let mut den = x.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while den.is_multiple_of(&two) {
        den /= &two;
        twos += 1;
    }
    while den.is_multiple_of(&five) {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    let digits = twos.max(fives);
    let scaled = (x * Q::from_integer(pow10(digits))).to_integer();
    let neg = scaled.is_negative();
    let mut body = scaled.abs().to_string();
    if body.len() <= digits as usize {
        body = format!("{}{}", "0".repeat(digits as usize + 1 - body.len()), body);
    }
    let split = body.len() - digits as usize;
    let out = format!("{}.{}", &body[..split], &body[split..]);
    if neg {
        format!("-{out}")
    } else {
        out
    }
}

pub(crate) mod serde_q {
    use super::{format_rational, parse_rational, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => parse_rational(&s).map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(super::qi(i)),
        }
    }
}

pub(crate) mod serde_qvec {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "super::serde_q")] Q);

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<W> = xs.iter().cloned().map(W).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v: Vec<W> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

pub(crate) mod serde_qvec_opt {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "super::serde_qvec")] Vec<Q>);

    pub fn serialize<S: Serializer>(xs: &Option<Vec<Q>>, s: S) -> Result<S::Ok, S::Error> {
        xs.as_ref().map(|v| W(v.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Q>>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}
