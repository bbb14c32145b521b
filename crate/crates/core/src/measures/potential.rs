use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::symbolic::{recode_higher_block, BlockRecoding, Sft, Word};
use crate::{Error, Result};

/// A potential depending on the first `range` symbols of a point.
///
/// Values are stored densely by base-`alphabet` code of the window, with
/// `NaN` at inadmissible windows. `sup` and `inf` range over admissible
/// windows only.
#[derive(Clone, Debug)]
pub struct LocallyConstantPotential {
    alphabet: usize,
    range: usize,
    values: Vec<f64>,
    sup: f64,
    inf: f64,
}

impl LocallyConstantPotential {
    pub fn from_fn<F: FnMut(&[usize]) -> f64>(sft: &Sft, range: usize, mut f: F) -> Result<Self> {
        if range == 0 {
            return Err(Error::Range("potential range must be at least 1".into()));
        }
        let alphabet = sft.alphabet();
        let size = alphabet
            .checked_pow(range as u32)
            .filter(|&s| s <= 1 << 24)
            .ok_or_else(|| Error::Budget(format!("alphabet^{range} windows is too many")))?;
        let mut values = vec![f64::NAN; size];
        let mut sup = f64::NEG_INFINITY;
        let mut inf = f64::INFINITY;
        for w in sft.words(range) {
            let v = f(&w.0);
            if !v.is_finite() {
                return Err(Error::Domain(format!("potential value at {w} is not finite")));
            }
            values[code(alphabet, &w.0)] = v;
            sup = sup.max(v);
            inf = inf.min(v);
        }
        Ok(LocallyConstantPotential {
            alphabet,
            range,
            values,
            sup,
            inf,
        })
    }

    pub fn constant(sft: &Sft, c: f64) -> Result<Self> {
        Self::from_fn(sft, 1, |_| c)
    }

    pub fn zero(sft: &Sft) -> Self {
        Self::constant(sft, 0.0).expect("zero potential")
    }

    /// Range-1 potential with one value per symbol.
    pub fn symbol_values(sft: &Sft, values: &[f64]) -> Result<Self> {
        if values.len() != sft.alphabet() {
            return Err(Error::Range(format!(
                "{} symbol values for alphabet of size {}",
                values.len(),
                sft.alphabet()
            )));
        }
        Self::from_fn(sft, 1, |w| values[w[0]])
    }

    /// Range-2 potential from a matrix indexed by consecutive symbol pairs.
    pub fn pair_values(sft: &Sft, values: &[Vec<f64>]) -> Result<Self> {
        let n = sft.alphabet();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::Range(format!("pair values must be {n}x{n}")));
        }
        Self::from_fn(sft, 2, |w| values[w[0]][w[1]])
    }

    /// Mapping from admissible windows to values.
    pub fn from_map(sft: &Sft, range: usize, map: &BTreeMap<Word, f64>) -> Result<Self> {
        let mut missing = None;
        let p = Self::from_fn(sft, range, |w| match map.get(&Word::from(w)) {
            Some(&v) => v,
            None => {
                missing.get_or_insert_with(|| Word::from(w));
                0.0
            }
        })?;
        match missing {
            Some(w) => Err(Error::Domain(format!("no value for admissible window {w}"))),
            None => Ok(p),
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn inf(&self) -> f64 {
        self.inf
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup.abs().max(self.inf.abs())
    }

    /// Value on a window of exactly `range` symbols; `None` if inadmissible.
    pub fn value(&self, window: &[usize]) -> Option<f64> {
        if window.len() != self.range || window.iter().any(|&s| s >= self.alphabet) {
            return None;
        }
        let v = self.values[code(self.alphabet, window)];
        (!v.is_nan()).then_some(v)
    }

    pub fn is_constant(&self) -> bool {
        self.sup - self.inf == 0.0
    }

    /// `S_n phi` of a point with the given prefix (needs `n + range - 1` symbols).
    pub fn birkhoff_sum(&self, prefix: &[usize], n: usize) -> Result<f64> {
        if prefix.len() + 1 < n + self.range {
            return Err(Error::Contract(format!(
                "Birkhoff sum of length {n} needs {} symbols, got {}",
                n + self.range - 1,
                prefix.len()
            )));
        }
        let mut sum = 0.0;
        for i in 0..n {
            let v = self.values[code(self.alphabet, &prefix[i..i + self.range])];
            if v.is_nan() {
                return Err(Error::Domain(format!("inadmissible window at position {i}")));
            }
            sum += v;
        }
        Ok(sum)
    }

    /// Running Birkhoff sums `S_1, .., S_n` along a prefix.
    pub fn running_sums(&self, prefix: &[usize], n: usize) -> Result<Vec<f64>> {
        if prefix.len() + 1 < n + self.range {
            return Err(Error::Contract("prefix too short for running sums".into()));
        }
        let mut out = Vec::with_capacity(n);
        let mut sum = 0.0;
        for i in 0..n {
            let v = self.values[code(self.alphabet, &prefix[i..i + self.range])];
            if v.is_nan() {
                return Err(Error::Domain(format!("inadmissible window at position {i}")));
            }
            sum += v;
            out.push(sum);
        }
        Ok(out)
    }

    /// The same function viewed as a potential of a larger range.
    pub fn lift(&self, sft: &Sft, range: usize) -> Result<Self> {
        if range < self.range {
            return Err(Error::Contract(format!(
                "cannot lift range {} down to {range}",
                self.range
            )));
        }
        let r = self.range;
        Self::from_fn(sft, range, |w| self.value(&w[..r]).expect("admissible prefix"))
    }

    /// `a * self + b * other`, on the larger of the two ranges.
    pub fn combine(&self, a: f64, other: &Self, b: f64, sft: &Sft) -> Result<Self> {
        let r = self.range.max(other.range);
        let (x, y) = (self.lift(sft, r)?, other.lift(sft, r)?);
        Self::from_fn(sft, r, |w| a * x.value(w).unwrap() + b * y.value(w).unwrap())
    }

    pub fn scaled(&self, sft: &Sft, c: f64) -> Result<Self> {
        Self::from_fn(sft, self.range, |w| c * self.value(w).unwrap())
    }

    pub fn add_constant(&self, sft: &Sft, c: f64) -> Result<Self> {
        Self::from_fn(sft, self.range, |w| c + self.value(w).unwrap())
    }

    /// `phi o shift`, a potential of range `range + 1`.
    pub fn compose_shift(&self, sft: &Sft) -> Result<Self> {
        Self::from_fn(sft, self.range + 1, |w| self.value(&w[1..]).unwrap())
    }

    /// `phi + h - h o shift` for a range-1 transfer function `h`.
    pub fn add_coboundary(&self, sft: &Sft, h: &[f64]) -> Result<Self> {
        if h.len() != self.alphabet {
            return Err(Error::Range("coboundary needs one value per symbol".into()));
        }
        let r = self.range.max(2);
        let base = self.lift(sft, r)?;
        Self::from_fn(sft, r, |w| base.value(w).unwrap() + h[w[0]] - h[w[1]])
    }

    /// Pull back along a higher-block recoding: a potential on the block
    /// shift of range `max(1, range - block + 1)`.
    pub fn pullback(&self, recoding: &BlockRecoding) -> Result<Self> {
        let new_range = (self.range + 1).saturating_sub(recoding.block).max(1);
        Self::from_fn(&recoding.sft, new_range, |w| {
            let original = recoding.decode(w);
            self.value(&original[..self.range]).expect("admissible window")
        })
    }

    /// Rewrite on a shift where the potential has range at most 2.
    /// Returns the recoding used, if any.
    pub fn to_range_two(&self, sft: &Sft) -> Result<(Option<BlockRecoding>, Self)> {
        if self.range <= 2 {
            return Ok((None, self.clone()));
        }
        let recoding = recode_higher_block(sft, self.range - 1)?;
        let pulled = self.pullback(&recoding)?;
        Ok((Some(recoding), pulled))
    }

    /// Value on the edge `i -> j` when viewed as a function of the first two symbols.
    pub fn edge_value(&self, i: usize, j: usize) -> f64 {
        match self.range {
            1 => self.values[i],
            2 => self.values[i * self.alphabet + j],
            _ => panic!("edge_value needs range <= 2"),
        }
    }

    /// Admissible windows with their values, in lexicographic order.
    pub fn entries(&self, sft: &Sft) -> Vec<(Word, f64)> {
        sft.words(self.range)
            .into_iter()
            .map(|w| {
                let v = self.value(&w.0).unwrap();
                (w, v)
            })
            .collect()
    }
}

impl PartialEq for LocallyConstantPotential {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.range == other.range
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a == b || (a.is_nan() && b.is_nan()))
    }
}

pub(crate) fn code(alphabet: usize, window: &[usize]) -> usize {
    window.iter().fold(0, |acc, &s| acc * alphabet + s)
}

/// Serialized form: `{ "range": r, "values": { "01": 0.5, .. } }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialJson {
    pub range: usize,
    pub values: BTreeMap<String, f64>,
}

impl LocallyConstantPotential {
    pub fn to_json(&self, sft: &Sft) -> PotentialJson {
        PotentialJson {
            range: self.range,
            values: self
                .entries(sft)
                .into_iter()
                .map(|(w, v)| (w.to_string(), v))
                .collect(),
        }
    }

    pub fn from_json(sft: &Sft, json: &PotentialJson) -> Result<Self> {
        let map = json
            .values
            .iter()
            .map(|(k, &v)| Ok((k.parse::<Word>()?, v)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::from_map(sft, json.range, &map)
    }
}
