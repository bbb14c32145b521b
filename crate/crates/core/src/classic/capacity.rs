use std::collections::BTreeSet;

use super::log_sum_exp;
use crate::measures::LocallyConstantPotential;
use crate::symbolic::{PointSpec, Sft};
use crate::{Error, Result};

/// What the spanning families have to cover.
#[derive(Clone, Debug)]
pub enum CapacityTarget {
    Points(Vec<PointSpec>),
    /// Every admissible cylinder.
    WholeShift,
}

/// `(1/n) log Q_n` at `n` and `n + 1`, returned as `(smaller, larger)`.
///
/// Bowen balls of radius `2^-k` in the `1/2`-metric are cylinders of depth
/// `n + k`, so a minimal spanning family picks one centre per depth-`(n+k)`
/// cylinder meeting the target. `k` is raised to `range - 1` when smaller,
/// which makes `S_n phi` constant on each ball.
pub fn capacity_pressure_estimate(
    sft: &Sft,
    target: &CapacityTarget,
    phi: &LocallyConstantPotential,
    n: usize,
    k: usize,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Range("time must be positive".into()));
    }
    let k = k.max(phi.range() - 1);
    let a = log_q(sft, target, phi, n, k)? / n as f64;
    let b = log_q(sft, target, phi, n + 1, k)? / (n + 1) as f64;
    Ok((a.min(b), a.max(b)))
}

fn log_q(sft: &Sft, target: &CapacityTarget, phi: &LocallyConstantPotential, n: usize, k: usize) -> Result<f64> {
    match target {
        CapacityTarget::Points(points) => {
            if points.is_empty() {
                return Err(Error::Contract("capacity target must be nonempty".into()));
            }
            let mut words = BTreeSet::new();
            for x in points {
                words.insert(x.admissible_prefix(sft, n + k)?);
            }
            let sums = words
                .iter()
                .map(|w| phi.birkhoff_sum(w, n))
                .collect::<Result<Vec<_>>>()?;
            Ok(log_sum_exp(sums))
        }
        CapacityTarget::WholeShift => Ok(whole_shift_log_sum(sft, phi, n, n + k)),
    }
}

/// `log` of the sum over admissible words of length `len` of `exp(S_n phi)`,
/// by dynamic programming over the last `range - 1` symbols.
fn whole_shift_log_sum(sft: &Sft, phi: &LocallyConstantPotential, n: usize, len: usize) -> f64 {
    let r = phi.range();
    let states: Vec<Vec<usize>> = if r == 1 {
        vec![vec![]]
    } else {
        sft.words(r - 1).into_iter().map(|w| w.0).collect()
    };
    // weight[(state)] for words of length r - 1 (or the empty word)
    let mut weight: Vec<f64> = vec![0.0; states.len()];
    let mut cur_len = r - 1;
    // position of the next window start whose value is added
    let mut pos = 0usize;
    let index: std::collections::HashMap<&[usize], usize> =
        states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    if r == 1 {
        // state carries the last symbol instead
        let a = sft.alphabet();
        let mut w = vec![0.0; a];
        for (s, x) in w.iter_mut().enumerate() {
            *x = if n > 0 { phi.value(&[s]).unwrap() } else { 0.0 };
        }
        for t in 1..len {
            let mut next = vec![f64::NEG_INFINITY; a];
            for (s, x) in next.iter_mut().enumerate() {
                let add = if t < n { phi.value(&[s]).unwrap() } else { 0.0 };
                *x = log_sum_exp((0..a).filter(|&p| sft.allows(p, s)).map(|p| w[p])) + add;
            }
            w = next;
        }
        return log_sum_exp(w);
    }
    while cur_len < len {
        let mut next = vec![f64::NEG_INFINITY; states.len()];
        let mut incoming: Vec<Vec<f64>> = vec![Vec::new(); states.len()];
        for (i, st) in states.iter().enumerate() {
            if weight[i] == f64::NEG_INFINITY {
                continue;
            }
            let last = *st.last().unwrap();
            for s in sft.successors(last) {
                let mut window = st.clone();
                window.push(s);
                let Some(v) = phi.value(&window) else { continue };
                let add = if pos < n { v } else { 0.0 };
                if let Some(&j) = index.get(&window[1..]) {
                    incoming[j].push(weight[i] + add);
                }
            }
        }
        for (j, inc) in incoming.into_iter().enumerate() {
            next[j] = log_sum_exp(inc);
        }
        weight = next;
        cur_len += 1;
        pos += 1;
    }
    log_sum_exp(weight)
}
