use std::collections::{BTreeMap, HashMap};

use super::MarkovMeasure;
use crate::symbolic::{PointSpec, Sft, Word};
use crate::{Error, Result};

/// Depth-`k` cylinder frequencies of the empirical measure
/// `(1/n) sum_{i<n} delta_{shift^i x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    pub depth: usize,
    pub sample_length: usize,
    pub freq: BTreeMap<Word, f64>,
}

/// Anything that can report its depth-`k` cylinder distribution.
pub trait CylinderDistribution {
    fn cylinder_distribution(&self, depth: usize) -> Result<BTreeMap<Word, f64>>;
}

impl CylinderDistribution for MarkovMeasure {
    fn cylinder_distribution(&self, depth: usize) -> Result<BTreeMap<Word, f64>> {
        Ok(self.cylinder_probabilities(depth))
    }
}

impl CylinderDistribution for EmpiricalMeasure {
    fn cylinder_distribution(&self, depth: usize) -> Result<BTreeMap<Word, f64>> {
        if depth > self.depth {
            return Err(Error::Contract(format!(
                "empirical measure of depth {} cannot be refined to depth {depth}",
                self.depth
            )));
        }
        if depth == self.depth {
            return Ok(self.freq.clone());
        }
        let mut out = BTreeMap::new();
        for (w, &p) in &self.freq {
            *out.entry(Word::from(&w.0[..depth])).or_insert(0.0) += p;
        }
        Ok(out)
    }
}

impl CylinderDistribution for BTreeMap<Word, f64> {
    fn cylinder_distribution(&self, depth: usize) -> Result<BTreeMap<Word, f64>> {
        let own = self.keys().next().map(|w| w.len()).unwrap_or(depth);
        if depth > own {
            return Err(Error::Contract("distribution is too shallow".into()));
        }
        let mut out = BTreeMap::new();
        for (w, &p) in self {
            *out.entry(Word::from(&w.0[..depth])).or_insert(0.0) += p;
        }
        Ok(out)
    }
}

impl EmpiricalMeasure {
    pub(crate) fn from_counts(depth: usize, sample_length: usize, counts: &HashMap<Vec<usize>, u64>) -> Self {
        let total = sample_length as f64;
        let freq = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(w, &c)| (Word(w.clone()), c as f64 / total))
            .collect();
        EmpiricalMeasure {
            depth,
            sample_length,
            freq,
        }
    }

    /// L1 gap between the depth-(k-1) marginals taken over the first and
    /// over the last `k - 1` symbols. Bounded by `2k/n`.
    pub fn marginal_defect(&self) -> f64 {
        if self.depth < 2 {
            return 0.0;
        }
        let mut head: BTreeMap<&[usize], f64> = BTreeMap::new();
        let mut tail: BTreeMap<&[usize], f64> = BTreeMap::new();
        for (w, &p) in &self.freq {
            *head.entry(&w.0[..self.depth - 1]).or_insert(0.0) += p;
            *tail.entry(&w.0[1..]).or_insert(0.0) += p;
        }
        let keys: std::collections::BTreeSet<&[usize]> = head.keys().chain(tail.keys()).copied().collect();
        keys.into_iter()
            .map(|k| (head.get(k).unwrap_or(&0.0) - tail.get(k).unwrap_or(&0.0)).abs())
            .sum()
    }

    /// Integral of a range-`r` potential, `r <= depth`.
    pub fn integrate(&self, phi: &super::LocallyConstantPotential) -> Result<f64> {
        let dist = self.cylinder_distribution(phi.range())?;
        dist.iter()
            .map(|(w, &p)| {
                phi.value(&w.0)
                    .map(|v| p * v)
                    .ok_or_else(|| Error::Domain(format!("window {w} not admissible")))
            })
            .sum()
    }
}

/// Sliding-window depth-`k` frequencies over positions `0..n` of the orbit.
pub fn empirical_from_prefix(sft: &Sft, x: &PointSpec, n: usize, depth: usize) -> Result<EmpiricalMeasure> {
    if depth == 0 || n < depth {
        return Err(Error::Contract(format!(
            "need n >= depth >= 1, got n={n}, depth={depth}"
        )));
    }
    let prefix = x.admissible_prefix(sft, n + depth - 1)?;
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for i in 0..n {
        *counts.entry(prefix[i..i + depth].to_vec()).or_insert(0) += 1;
    }
    Ok(EmpiricalMeasure::from_counts(depth, n, &counts))
}

/// L1 (total variation, unnormalized) distance between depth-`k`
/// cylinder distributions; lies in `[0, 2]`.
pub fn cylinder_distance(
    a: &dyn CylinderDistribution,
    b: &dyn CylinderDistribution,
    depth: usize,
) -> Result<f64> {
    let pa = a.cylinder_distribution(depth)?;
    let pb = b.cylinder_distribution(depth)?;
    Ok(l1(&pa, &pb))
}

pub(crate) fn l1(pa: &BTreeMap<Word, f64>, pb: &BTreeMap<Word, f64>) -> f64 {
    let mut d = 0.0;
    for (w, &p) in pa {
        d += (p - pb.get(w).copied().unwrap_or(0.0)).abs();
    }
    for (w, &q) in pb {
        if !pa.contains_key(w) {
            d += q;
        }
    }
    d.min(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        let full = Sft::full(2);
        let e = empirical_from_prefix(&full, &PointSpec::periodic("01").unwrap(), 10, 1).unwrap();
        assert_eq!(e.freq, BTreeMap::from([(w("0"), 0.5), (w("1"), 0.5)]));
        let e = empirical_from_prefix(&full, &PointSpec::periodic("0").unwrap(), 17, 2).unwrap();
        assert_eq!(e.freq, BTreeMap::from([(w("00"), 1.0)]));
        let e = empirical_from_prefix(&full, &PointSpec::stored("0010").unwrap(), 4, 1).unwrap();
        assert_eq!(e.freq, BTreeMap::from([(w("0"), 0.75), (w("1"), 0.25)]));
    }

    #[test]
    fn inadmissible_prefix() {
        let g = Sft::golden_mean();
        let r = empirical_from_prefix(&g, &PointSpec::stored("0110").unwrap(), 4, 1);
        assert!(matches!(r, Err(Error::Domain(_))));
        assert!(empirical_from_prefix(&g, &PointSpec::stored("0").unwrap(), 1, 2).is_err());
    }

    #[test]
    fn distance_examples() {
        let full = Sft::full(2);
        let a = empirical_from_prefix(&full, &PointSpec::periodic("0").unwrap(), 8, 2).unwrap();
        let b = empirical_from_prefix(&full, &PointSpec::periodic("1").unwrap(), 8, 2).unwrap();
        assert_eq!(cylinder_distance(&a, &a, 2).unwrap(), 0.0);
        assert_eq!(cylinder_distance(&a, &b, 2).unwrap(), 2.0);
        let half = MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
        let quarter = MarkovMeasure::bernoulli(&[0.75, 0.25]).unwrap();
        assert_abs_diff_eq!(cylinder_distance(&half, &quarter, 1).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(cylinder_distance(&a, &half, 3), Err(Error::Contract(_))));
    }

    #[test]
    fn marginal_defect_bound() {
        let full = Sft::full(3);
        let x = PointSpec::stored("0120012221010201").unwrap();
        for k in 1..=4 {
            let n = 16 - k + 1;
            let e = empirical_from_prefix(&full, &x, n, k).unwrap();
            let total: f64 = e.freq.values().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            assert!(e.marginal_defect() <= 2.0 * k as f64 / n as f64 + 1e-12);
        }
    }
}
