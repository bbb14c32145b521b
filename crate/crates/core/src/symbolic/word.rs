use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// A finite sequence of symbols. Admissibility is always relative to an
/// [`Sft`](super::Sft) and is checked where a word is consumed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn repeat(&self, n: usize) -> Word {
        Word(self.0.iter().copied().cycle().take(self.0.len() * n).collect())
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl From<&[usize]> for Word {
    fn from(v: &[usize]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            match DIGITS.get(s) {
                Some(&c) => write!(f, "{}", c as char)?,
                None => write!(f, "<{s}>")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::Parse(format!("invalid symbol {c:?} in word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if let Some(&s) = self.0.iter().find(|&&s| s >= DIGITS.len()) {
            return Err(serde::ser::Error::custom(format!(
                "symbol {s} has no single-character encoding"
            )));
        }
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The set of points whose first `depth` symbols spell `base`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    pub base: Word,
}

impl Cylinder {
    pub fn new(base: Word) -> Self {
        Cylinder { base }
    }

    pub fn depth(&self) -> usize {
        self.base.len()
    }

    pub fn contains_prefix(&self, prefix: &[usize]) -> bool {
        prefix.len() >= self.depth() && prefix[..self.depth()] == self.base.0[..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let w: Word = "01az".parse().unwrap();
        assert_eq!(w.0, vec![0, 1, 10, 35]);
        assert_eq!(w.to_string(), "01az");
        assert!("0-1".parse::<Word>().is_err());
    }

    #[test]
    fn oversized_symbol_refuses_to_serialize() {
        let w = Word(vec![40]);
        assert!(serde_json::to_string(&w).is_err());
    }
}
