//! Serde adapters writing `f64` as shortest round-trip decimal strings.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

pub fn format(v: f64) -> String {
    format!("{v:?}")
}

pub fn parse(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("invalid decimal `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite decimal `{s}`"))
    }
}

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format(*v))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let s = String::deserialize(d)?;
    parse(&s).map_err(D::Error::custom)
}

pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&super::format(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| super::parse(s).map_err(D::Error::custom)).collect()
    }
}
