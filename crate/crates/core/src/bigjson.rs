//! Unbounded integers as plain JSON numbers.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn number(n: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&n.to_string()).expect("decimal integer is a JSON number")
}

pub(crate) fn parse_number(n: &serde_json::Number) -> Option<BigInt> {
    BigInt::from_str(&n.to_string()).ok()
}

pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    number(n).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    let n = serde_json::Number::deserialize(d)?;
    parse_number(&n).ok_or_else(|| serde::de::Error::custom(format!("expected an integer, got {n}")))
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(number))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<serde_json::Number>::deserialize(d)?;
        v.iter()
            .map(|n| parse_number(n).ok_or_else(|| serde::de::Error::custom(format!("expected an integer, got {n}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrap {
        #[serde(with = "super")]
        n: BigInt,
        #[serde(with = "super::vec")]
        v: Vec<BigInt>,
    }

    #[test]
    fn big_values_round_trip_as_numbers() {
        let big: BigInt = "-123456789012345678901234567890".parse().unwrap();
        let w = Wrap { n: big.clone(), v: vec![BigInt::from(-1), big] };
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"n":-123456789012345678901234567890,"v":[-1,-123456789012345678901234567890]}"#);
        assert_eq!(serde_json::from_str::<Wrap>(&s).unwrap(), w);
        assert!(serde_json::from_str::<Wrap>(r#"{"n":1.5,"v":[]}"#).is_err());
    }
}
