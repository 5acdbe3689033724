//! JSON encoding of scalars:
//! `{"rat":[num,den]}` | `{"surd":[a_num,a_den,b_num,b_den,d]}` |
//! `{"approx":{"dec":"…","guard":"1e-30"}}`. Round-trips bit-exactly.

use super::{parse_decimal, to_decimal_string, NumericError, ScalarValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::de::{Error as DeError, MapAccess, Visitor};
use serde::ser::{Error as SerError, SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

fn bigint_number<S: Serializer>(v: &BigInt) -> Result<serde_json::Number, S::Error> {
    serde_json::Number::from_str(&v.to_string())
        .map_err(|_| S::Error::custom("integer too large for JSON number"))
}

/// `#[serde(serialize_with = ...)]` helper emitting big integers as plain
/// JSON numbers (lossless under the arbitrary-precision feature).
pub fn serialize_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    bigint_number::<S>(v)?.serialize(s)
}

/// Rationals in reports travel as exact `"p/q"` strings.
pub fn serialize_rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
}

pub fn serialize_rational_vec<S: Serializer>(
    v: &[BigRational],
    s: S,
) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&format!("{}/{}", x.numer(), x.denom()))?;
    }
    seq.end()
}

struct Seq<'a>(Vec<&'a BigInt>);

impl Serialize for Seq<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for v in &self.0 {
            seq.serialize_element(&bigint_number::<S>(v)?)?;
        }
        seq.end()
    }
}

struct SeqWithTail<'a>(Vec<&'a BigInt>, u64);

impl Serialize for SeqWithTail<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len() + 1))?;
        for v in &self.0 {
            seq.serialize_element(&bigint_number::<S>(v)?)?;
        }
        seq.serialize_element(&self.1)?;
        seq.end()
    }
}

impl Serialize for ScalarValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        match self {
            ScalarValue::Rational(r) => {
                map.serialize_entry("rat", &Seq(vec![r.numer(), r.denom()]))?;
            }
            ScalarValue::Surd { a, b, d } => {
                map.serialize_entry(
                    "surd",
                    &SeqWithTail(vec![a.numer(), a.denom(), b.numer(), b.denom()], *d),
                )?;
            }
            ScalarValue::Approx { value, guard } => {
                let dec = to_decimal_string(value).ok_or_else(|| {
                    S::Error::custom("approx value not exactly representable in decimal")
                })?;
                let guard = to_decimal_string(guard)
                    .ok_or_else(|| S::Error::custom("guard not exactly representable in decimal"))?;
                #[derive(Serialize)]
                struct Approx {
                    dec: String,
                    guard: String,
                }
                map.serialize_entry("approx", &Approx { dec, guard })?;
            }
        }
        map.end()
    }
}

fn number_to_bigint<E: DeError>(v: &serde_json::Value) -> Result<BigInt, E> {
    match v {
        serde_json::Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| E::custom(format!("expected integer, got {n}"))),
        serde_json::Value::String(s) => {
            BigInt::from_str(s).map_err(|_| E::custom(format!("expected integer, got {s:?}")))
        }
        other => Err(E::custom(format!("expected integer, got {other}"))),
    }
}

pub(crate) fn scalar_from_value(v: &serde_json::Value) -> Result<ScalarValue, NumericError> {
    let obj = v
        .as_object()
        .ok_or_else(|| NumericError::Parse(format!("scalar must be an object, got {v}")))?;
    if obj.len() != 1 {
        return Err(NumericError::Parse(
            "scalar object must have exactly one key".into(),
        ));
    }
    let (key, val) = obj.iter().next().unwrap();
    let int_at = |arr: &[serde_json::Value], i: usize| -> Result<BigInt, NumericError> {
        number_to_bigint::<serde_json::Error>(&arr[i]).map_err(|e| NumericError::Parse(e.to_string()))
    };
    match key.as_str() {
        "rat" => {
            let arr = val
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| NumericError::Parse("rat expects [num, den]".into()))?;
            let num = int_at(arr, 0)?;
            let den = int_at(arr, 1)?;
            if den.is_negative() || den == BigInt::from(0) {
                return Err(NumericError::Parse("denominator must be positive".into()));
            }
            Ok(ScalarValue::Rational(BigRational::new(num, den)))
        }
        "surd" => {
            let arr = val
                .as_array()
                .filter(|a| a.len() == 5)
                .ok_or_else(|| NumericError::Parse("surd expects [a_num,a_den,b_num,b_den,d]".into()))?;
            let a_num = int_at(arr, 0)?;
            let a_den = int_at(arr, 1)?;
            let b_num = int_at(arr, 2)?;
            let b_den = int_at(arr, 3)?;
            if a_den.is_negative() || b_den.is_negative() || a_den == BigInt::from(0) || b_den == BigInt::from(0) {
                return Err(NumericError::Parse("denominators must be positive".into()));
            }
            let d = arr[4]
                .as_u64()
                .ok_or_else(|| NumericError::Parse("radicand must be a positive integer".into()))?;
            ScalarValue::surd(BigRational::new(a_num, a_den), BigRational::new(b_num, b_den), d)
        }
        "approx" => {
            let dec = val
                .get("dec")
                .and_then(|d| d.as_str())
                .ok_or_else(|| NumericError::Parse("approx expects a dec string".into()))?;
            let guard = val
                .get("guard")
                .and_then(|d| d.as_str())
                .ok_or_else(|| NumericError::Parse("approx expects a guard string".into()))?;
            if val.as_object().map(|o| o.len()) != Some(2) {
                return Err(NumericError::Parse("approx expects exactly dec and guard".into()));
            }
            ScalarValue::approx(parse_decimal(dec)?, parse_decimal(guard)?)
        }
        other => Err(NumericError::Parse(format!("unknown scalar kind {other:?}"))),
    }
}

impl<'de> Deserialize<'de> for ScalarValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ScalarValue;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a scalar object with key rat, surd or approx")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut obj = serde_json::Map::new();
                while let Some((k, v)) = map.next_entry::<String, serde_json::Value>()? {
                    obj.insert(k, v);
                }
                scalar_from_value(&serde_json::Value::Object(obj))
                    .map_err(|e| A::Error::custom(e.to_string()))
            }
        }
        d.deserialize_map(V)
    }
}

/// Parse the CLI scalar syntax: `"3/4"`, `"2"`, `"s:a,b,d"` (meaning `a+b√d`
/// with `a`, `b` rationals) or `"a:<decimal>,<guard>"`.
pub fn parse_scalar_text(s: &str) -> Result<ScalarValue, NumericError> {
    let s = s.trim();
    if let Some(body) = s.strip_prefix("s:") {
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 3 {
            return Err(NumericError::Parse(format!("surd syntax is s:a,b,d, got {s:?}")));
        }
        let a = parse_rational_text(parts[0])?;
        let b = parse_rational_text(parts[1])?;
        let d: u64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| NumericError::Parse(format!("bad radicand in {s:?}")))?;
        return ScalarValue::surd(a, b, d);
    }
    if let Some(body) = s.strip_prefix("a:") {
        let parts: Vec<&str> = body.split(',').collect();
        let value = parse_decimal(parts[0])?;
        let guard = if parts.len() > 1 {
            parse_decimal(parts[1])?
        } else {
            super::default_guard()
        };
        return ScalarValue::approx(value, guard);
    }
    Ok(ScalarValue::Rational(parse_rational_text(s)?))
}

pub fn parse_rational_text(s: &str) -> Result<BigRational, NumericError> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num = BigInt::from_str(n.trim())
            .map_err(|_| NumericError::Parse(format!("bad numerator in {s:?}")))?;
        let den = BigInt::from_str(d.trim())
            .map_err(|_| NumericError::Parse(format!("bad denominator in {s:?}")))?;
        if den <= BigInt::from(0) {
            return Err(NumericError::Parse("denominator must be positive".into()));
        }
        Ok(BigRational::new(num, den))
    } else if s.contains('.') || s.contains('e') || s.contains('E') {
        parse_decimal(s)
    } else {
        let num =
            BigInt::from_str(s).map_err(|_| NumericError::Parse(format!("bad integer {s:?}")))?;
        Ok(BigRational::from_integer(num))
    }
}
