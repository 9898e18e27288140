//! Characteristic functions with extended-real worths.

use std::collections::HashMap;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coalition::Coalition;
use crate::error::{GameError, Result};

/// Map from every coalition to a worth in `ℝ ∪ {-∞}`, with `v(∅) = 0` and
/// `v(N)` finite. Worths are indexed by coalition bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFn {
    n: usize,
    worths: Vec<f64>,
}

impl CharFn {
    pub fn new(n: usize, mut worths: Vec<f64>) -> Result<Self> {
        if n == 0 || n > crate::coalition::MAX_REPRESENTABLE_PLAYERS {
            return Err(GameError::InvalidGame(format!("unsupported player count {n}")));
        }
        if worths.len() != 1 << n {
            return Err(GameError::InvalidGame(format!(
                "characteristic function on {n} players needs {} worths, got {}",
                1usize << n,
                worths.len()
            )));
        }
        if worths[0] != 0.0 {
            return Err(GameError::InvalidGame("worth of the empty coalition must be 0".into()));
        }
        if let Some(k) = worths.iter().position(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(GameError::InvalidGame(format!(
                "worth of coalition {} must be finite or -inf",
                Coalition::from_bits(k as u32)
            )));
        }
        if !worths[(1 << n) - 1].is_finite() {
            return Err(GameError::InvalidGame("worth of the grand coalition must be finite".into()));
        }
        // fold -0.0 into 0.0 so serialized reports never show a signed zero
        for w in &mut worths {
            *w += 0.0;
        }
        Ok(CharFn { n, worths })
    }

    pub fn from_fn<F: Fn(Coalition) -> f64>(n: usize, worth: F) -> Result<Self> {
        let worths = Coalition::all(n)
            .map(|s| if s.is_empty() { 0.0 } else { worth(s) })
            .collect();
        CharFn::new(n, worths)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn worth(&self, coalition: Coalition) -> f64 {
        self.worths[coalition.bits() as usize]
    }

    pub fn grand_worth(&self) -> f64 {
        self.worths[self.worths.len() - 1]
    }

    /// Worths indexed by coalition bitmask.
    pub fn worths(&self) -> &[f64] {
        &self.worths
    }

    pub fn scaled(&self, factor: f64) -> Result<CharFn> {
        CharFn::new(self.n, self.worths.iter().map(|w| w * factor).collect())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WorthRepr {
    Number(f64),
    Text(String),
}

pub(crate) fn worth_to_json(w: f64) -> serde_json::Value {
    if w == f64::NEG_INFINITY {
        serde_json::Value::String("-inf".into())
    } else {
        serde_json::json!(w)
    }
}

struct WorthMap<'a>(&'a [f64]);

impl Serialize for WorthMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (mask, &w) in self.0.iter().enumerate() {
            map.serialize_entry(&mask.to_string(), &worth_to_json(w))?;
        }
        map.end()
    }
}

impl Serialize for CharFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("worths", &WorthMap(&self.worths))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for CharFn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            n: usize,
            worths: HashMap<String, WorthRepr>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.n == 0 || raw.n > crate::coalition::MAX_REPRESENTABLE_PLAYERS {
            return Err(D::Error::custom(format!("unsupported player count {}", raw.n)));
        }
        let mut worths = vec![f64::NAN; 1 << raw.n];
        for (key, value) in raw.worths {
            let mask: usize = key
                .parse()
                .map_err(|_| D::Error::custom(format!("coalition key {key:?} is not a bitmask")))?;
            if mask >= worths.len() {
                return Err(D::Error::custom(format!("coalition key {mask} out of range")));
            }
            worths[mask] = match value {
                WorthRepr::Number(x) => x,
                WorthRepr::Text(t) if t == "-inf" => f64::NEG_INFINITY,
                WorthRepr::Text(t) => {
                    return Err(D::Error::custom(format!("invalid worth {t:?}")));
                }
            };
        }
        if let Some(k) = worths.iter().position(|w| w.is_nan()) {
            return Err(D::Error::custom(format!("missing worth for coalition {k}")));
        }
        CharFn::new(raw.n, worths).map_err(D::Error::custom)
    }
}
