//! Exact rationals used for every reported value and guarantee.

use num_rational::Ratio;

pub type Rational = Ratio<u64>;

/// Serializes a [`Rational`] as the string `"num/den"` (or `"n"` when integral).
pub mod as_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// `r` as a float, for Monte-Carlo comparisons only.
pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
