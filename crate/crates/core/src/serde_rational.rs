//! Rationals as `"a/b"` strings in JSON.

use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serializer};

use crate::rates::parse_rational;

pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
    let text = String::deserialize(d)?;
    parse_rational(&text).ok_or_else(|| serde::de::Error::custom(format!("not a rational: {text:?}")))
}
