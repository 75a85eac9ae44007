//! Exact rational scalars and their string serialization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"p/q"`, `"p"` or a plain integer literal.
pub fn parse_q(text: &str) -> Option<Q> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = t.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both parts down so the quotient fits a double.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as u64;
    let shift_d = (db - 60).max(0) as u64;
    let n = (x.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Exact value of a finite double.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

/// Rounds to the nearest multiple of `2^-bits`.
pub fn round_bits(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = x * Q::from_integer(scale.clone());
    Q::new(scaled.round().to_integer(), scale)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub fn pow(x: &Q, k: u32) -> Q {
    let mut r = Q::one();
    for _ in 0..k {
        r *= x;
    }
    r
}

pub fn max(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn min(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod qstr {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse_q(&s).ok_or_else(|| D::Error::custom("bad rational")),
            serde_json::Value::Number(n) => parse_q(&n.to_string()).ok_or_else(|| D::Error::custom("bad rational")),
            _ => Err(D::Error::custom("expected rational")),
        }
    }
}

pub mod qvec {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(fmt_q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|s| parse_q(s).ok_or_else(|| D::Error::custom("bad rational")))
            .collect()
    }
}

pub mod qopt {
    use super::{fmt_q, Q};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&fmt_q(v)),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_q("6/4").unwrap(), qr(3, 2));
        assert_eq!(parse_q("-7").unwrap(), q(-7));
        assert_eq!(fmt_q(&qr(-3, 6)), "-1/2");
        assert_eq!(fmt_q(&q(4)), "4");
        assert!(parse_q("1/0").is_none());
        assert!(parse_q("0.5").is_none());
    }

    #[test]
    fn float_conversion_handles_huge_parts() {
        let big = Q::new(BigInt::one() << 2000u32, (BigInt::one() << 1999u32) * 3);
        assert!((to_f64(&big) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(to_f64(&qr(1, 4)), 0.25);
    }

    #[test]
    fn rounding_to_binary_grid() {
        let x = qr(1, 3);
        let r = round_bits(&x, 10);
        assert!(abs(&(r - x)) <= qr(1, 2048));
    }
}
