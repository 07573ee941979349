//! Exact rational helpers and their JSON encoding.
//!
//! Numbers are accepted either as JSON numbers, read through their shortest
//! decimal form (so `0.6` becomes exactly `3/5`), or as strings such as
//! `"3/2"`, `"0.25"` or `"-4"`. They are written back as strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The exact rational whose decimal expansion is the shortest string that
/// round-trips to `x`.
pub fn from_f64(x: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    parse_q(&format!("{x}")).ok()
}

pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"`, integers and decimals with an optional exponent.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(format!("not a number: {s:?}"));
    }
    let all: BigInt = format!("0{int_part}{frac_part}")
        .parse()
        .expect("digits only");
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Q::from_integer(all);
    if scale >= 0 {
        value *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

pub fn min_q<'a>(a: &'a Q, b: &'a Q) -> &'a Q {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn is_nonneg(x: &Q) -> bool {
    !x.is_negative()
}

/// Serde adapter for a single exact number.
pub mod serde_q {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(serde_json::Number),
        Str(String),
    }

    fn from_raw<E: de::Error>(raw: Raw) -> Result<Q, E> {
        match raw {
            Raw::Str(s) => parse_q(&s).map_err(E::custom),
            Raw::Num(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(qi(i))
                } else {
                    let f = n.as_f64().ok_or_else(|| E::custom("number out of range"))?;
                    from_f64(f).ok_or_else(|| E::custom("non-finite number"))
                }
            }
        }
    }

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        from_raw(Raw::deserialize(d)?)
    }

    /// Serde adapter for a list of exact numbers.
    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            Vec::<Raw>::deserialize(d)?
                .into_iter()
                .map(from_raw)
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_q("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_q("0.6").unwrap(), q(3, 5));
        assert_eq!(parse_q("-1.25e-1").unwrap(), q(-1, 8));
        assert_eq!(parse_q("2E2").unwrap(), qi(200));
        assert_eq!(parse_q(".5").unwrap(), q(1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn floats_use_shortest_decimal() {
        assert_eq!(from_f64(0.6).unwrap(), q(3, 5));
        assert_eq!(from_f64(1e-7).unwrap(), q(1, 10_000_000));
        assert!(from_f64(f64::NAN).is_none());
    }

    #[test]
    fn format_round_trips() {
        for x in [q(3, 2), qi(-4), q(1, 3)] {
            assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
        }
    }
}
