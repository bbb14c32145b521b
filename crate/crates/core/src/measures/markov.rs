use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{xlogx, LocallyConstantPotential};
use crate::symbolic::{Sft, Word};
use crate::{Error, Result};

const ROW_TOL: f64 = 1e-12;

/// Shift-invariant Markov measure: a row-stochastic kernel together with a
/// stationary probability vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMarkov", into = "RawMarkov")]
pub struct MarkovMeasure {
    kernel: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMarkov {
    kernel: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl TryFrom<RawMarkov> for MarkovMeasure {
    type Error = Error;
    fn try_from(raw: RawMarkov) -> Result<Self> {
        MarkovMeasure::new(raw.kernel, raw.stationary)
    }
}

impl From<MarkovMeasure> for RawMarkov {
    fn from(m: MarkovMeasure) -> Self {
        RawMarkov {
            kernel: m.kernel,
            stationary: m.stationary,
        }
    }
}

impl MarkovMeasure {
    pub fn new(kernel: Vec<Vec<f64>>, stationary: Vec<f64>) -> Result<Self> {
        let n = kernel.len();
        if n == 0 || stationary.len() != n || kernel.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("kernel must be square and match the stationary vector".into()));
        }
        for (i, row) in kernel.iter().enumerate() {
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::Domain(format!("row {i} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::Domain(format!("row {i} sums to {s}")));
            }
        }
        if stationary.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::Domain("stationary vector has a negative entry".into()));
        }
        let total: f64 = stationary.iter().sum();
        if (total - 1.0).abs() > ROW_TOL {
            return Err(Error::Domain(format!("stationary vector sums to {total}")));
        }
        let m = MarkovMeasure { kernel, stationary };
        let residual = m.stationarity_residual();
        if residual > ROW_TOL {
            return Err(Error::Domain(format!(
                "stationary vector is not a fixed point (residual {residual:e})"
            )));
        }
        Ok(m)
    }

    /// Kernel with its stationary vector solved for. Fails unless the
    /// stationary vector is unique.
    pub fn from_kernel(kernel: Vec<Vec<f64>>) -> Result<Self> {
        let stationary = stationary_vector(&kernel)?;
        MarkovMeasure::new(kernel, stationary)
    }

    /// i.i.d. symbols with the given marginal, on the full shift.
    pub fn bernoulli(probs: &[f64]) -> Result<Self> {
        let kernel = vec![probs.to_vec(); probs.len()];
        MarkovMeasure::new(kernel, probs.to_vec())
    }

    /// Point mass on the fixed point `s^infinity`.
    pub fn fixed_point(sft: &Sft, s: usize) -> Result<Self> {
        Self::periodic_orbit(sft, &[s])
    }

    /// Uniform measure on the periodic orbit of a cycle of distinct symbols.
    pub fn periodic_orbit(sft: &Sft, cycle: &[usize]) -> Result<Self> {
        let n = sft.alphabet();
        if !sft.admits_cyclically(cycle)? {
            return Err(Error::Domain(format!("{} is not a cycle of the shift", Word::from(cycle))));
        }
        let mut seen = vec![false; n];
        for &s in cycle {
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::Domain(
                    "periodic orbit with a repeated symbol is not a one-step Markov measure".into(),
                ));
            }
        }
        let mut kernel = vec![vec![0.0; n]; n];
        for (i, row) in kernel.iter_mut().enumerate() {
            let succ: Vec<usize> = sft.successors(i).collect();
            for &j in &succ {
                row[j] = 1.0 / succ.len() as f64;
            }
            if succ.is_empty() {
                row[i] = 1.0;
            }
        }
        for (k, &s) in cycle.iter().enumerate() {
            let next = cycle[(k + 1) % cycle.len()];
            kernel[s] = vec![0.0; n];
            kernel[s][next] = 1.0;
        }
        let mut stationary = vec![0.0; n];
        for &s in cycle {
            stationary[s] = 1.0 / cycle.len() as f64;
        }
        MarkovMeasure::new(kernel, stationary)
    }

    pub fn size(&self) -> usize {
        self.kernel.len()
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn stationarity_residual(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|j| {
                let s: f64 = (0..n).map(|i| self.stationary[i] * self.kernel[i][j]).sum();
                (s - self.stationary[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Kernel is supported on allowed transitions of `sft`.
    pub fn compatible_with(&self, sft: &Sft) -> bool {
        self.size() == sft.alphabet()
            && self.kernel.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, &p)| p == 0.0 || sft.allows(i, j))
            })
    }

    pub fn check_compatible(&self, sft: &Sft) -> Result<()> {
        if self.compatible_with(sft) {
            Ok(())
        } else {
            Err(Error::Contract("measure is not supported on the shift".into()))
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.size()).filter(|&i| self.stationary[i] > 0.0).collect()
    }

    /// Irreducible on its support (hence ergodic).
    pub fn is_ergodic(&self) -> bool {
        let support = self.support();
        let Some(&start) = support.first() else {
            return false;
        };
        let reach = |from: usize, forward: bool| {
            let mut seen = vec![false; self.size()];
            let mut stack = vec![from];
            seen[from] = true;
            while let Some(u) = stack.pop() {
                for &v in &support {
                    let p = if forward { self.kernel[u][v] } else { self.kernel[v][u] };
                    if p > 0.0 && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        };
        let fwd = reach(start, true);
        let bwd = reach(start, false);
        support.iter().all(|&s| fwd[s] && bwd[s])
    }

    pub fn word_probability(&self, word: &[usize]) -> f64 {
        let Some(&first) = word.first() else {
            return 1.0;
        };
        if first >= self.size() {
            return 0.0;
        }
        let mut p = self.stationary[first];
        for w in word.windows(2) {
            if w[1] >= self.size() {
                return 0.0;
            }
            p *= self.kernel[w[0]][w[1]];
        }
        p
    }

    /// Depth-`k` cylinder probabilities, positive entries only.
    pub fn cylinder_probabilities(&self, k: usize) -> BTreeMap<Word, f64> {
        let mut out = BTreeMap::new();
        let mut stack: Vec<(Vec<usize>, f64)> = (0..self.size())
            .rev()
            .filter(|&i| self.stationary[i] > 0.0)
            .map(|i| (vec![i], self.stationary[i]))
            .collect();
        if k == 0 {
            out.insert(Word::default(), 1.0);
            return out;
        }
        while let Some((w, p)) = stack.pop() {
            if w.len() == k {
                out.insert(Word(w), p);
                continue;
            }
            let last = *w.last().unwrap();
            for j in (0..self.size()).rev() {
                let q = self.kernel[last][j];
                if q > 0.0 {
                    let mut next = w.clone();
                    next.push(j);
                    stack.push((next, p * q));
                }
            }
        }
        out
    }

    /// `sum_i pi_i sum_j P_ij f(i, j)`.
    pub fn edge_expectation<F: Fn(usize, usize) -> f64>(&self, f: F) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.kernel.iter().enumerate() {
            if self.stationary[i] == 0.0 {
                continue;
            }
            for (j, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    s += self.stationary[i] * p * f(i, j);
                }
            }
        }
        s
    }
}

/// Unique stationary vector of a stochastic kernel by a direct solve with
/// one step of iterative refinement.
pub(crate) fn stationary_vector(kernel: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = kernel.len();
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = kernel[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let lu = a.clone().lu();
    let mut x = lu
        .solve(&b)
        .ok_or_else(|| Error::Domain("stationary vector is not unique".into()))?;
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("stationary vector is not unique".into()));
    }
    let mut pi: Vec<f64> = x.iter().map(|&v| if v.abs() < 1e-15 { 0.0 } else { v }).collect();
    if pi.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain("kernel has no nonnegative stationary vector".into()));
    }
    let total: f64 = pi.iter().sum();
    for v in &mut pi {
        *v /= total;
    }
    Ok(pi)
}

/// Kolmogorov-Sinai entropy `-sum_i pi_i sum_j P_ij log P_ij`.
pub fn entropy(mu: &MarkovMeasure) -> f64 {
    let h: f64 = mu
        .kernel
        .iter()
        .zip(&mu.stationary)
        .map(|(row, &pi)| pi * row.iter().map(|&p| xlogx(p)).sum::<f64>())
        .sum();
    (-h).max(0.0)
}

/// Integral of a potential of range at most 2.
pub fn integrate(phi: &LocallyConstantPotential, mu: &MarkovMeasure) -> Result<f64> {
    if phi.alphabet() != mu.size() {
        return Err(Error::Contract(format!(
            "potential alphabet {} does not match measure size {}",
            phi.alphabet(),
            mu.size()
        )));
    }
    match phi.range() {
        1 => Ok(mu
            .stationary
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| p * phi.edge_value(i, i))
            .sum()),
        2 => {
            let mut s = 0.0;
            for (i, row) in mu.kernel.iter().enumerate() {
                for (j, &p) in row.iter().enumerate() {
                    let w = mu.stationary[i] * p;
                    if w > 0.0 {
                        let v = phi.value(&[i, j]).ok_or_else(|| {
                            Error::Contract("measure charges a window the potential omits".into())
                        })?;
                        s += w * v;
                    }
                }
            }
            Ok(s)
        }
        r => Err(Error::Contract(format!(
            "potential of range {r} must be recoded to range 2 before integrating"
        ))),
    }
}
