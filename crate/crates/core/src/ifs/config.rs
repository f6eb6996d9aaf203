//! Text config for IFS definitions.
//!
//! ```toml
//! # middle-thirds Cantor measure
//! support = ["0", "1"]
//! weights = ["1/2", "1/2"]
//! maps = [
//!   { ratio = "1/3", translation = "0" },
//!   { ratio = "1/3", translation = "2/3" },
//! ]
//! ```
//!
//! Numbers are decimal strings (`"0.25"`, `"-1e-3"`) or fractions (`"1/3"`)
//! and are read exactly. Bare TOML numbers are accepted as well.

use num_rational::BigRational;
use serde::Deserialize;

use super::{ExactMap, IteratedFunctionSystem};
use crate::error::{Error, Result};
use crate::rational;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Number {
    fn exact(&self) -> Result<BigRational> {
        match self {
            Number::Text(s) => rational::parse_exact(s),
            Number::Int(i) => Ok(BigRational::from_integer((*i).into())),
            Number::Float(f) if f.is_finite() => Ok(rational::from_f64(*f)),
            Number::Float(f) => Err(Error::Config(format!("non-finite number {f}"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapEntry {
    ratio: Number,
    translation: Number,
}

/// Raw config as read from disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsConfig {
    support: [Number; 2],
    weights: Vec<Number>,
    maps: Vec<MapEntry>,
}

impl IfsConfig {
    pub fn into_ifs(self) -> Result<IteratedFunctionSystem> {
        let maps = self
            .maps
            .iter()
            .map(|m| {
                Ok(ExactMap { ratio: m.ratio.exact()?, translation: m.translation.exact()? })
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = self.weights.iter().map(Number::exact).collect::<Result<Vec<_>>>()?;
        let support = (self.support[0].exact()?, self.support[1].exact()?);
        IteratedFunctionSystem::from_exact(maps, weights, support)
    }
}

/// Parses and validates an IFS config document.
pub fn parse_ifs_config(text: &str) -> Result<IteratedFunctionSystem> {
    let cfg: IfsConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.into_ifs()
}
