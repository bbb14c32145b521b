use super::cycles::max_cycle_mean;
use crate::measures::LocallyConstantPotential;
use crate::symbolic::Sft;
use crate::{Error, Result};

const PERRON_TOL: f64 = 1e-14;
const MAX_ITERATIONS: usize = 1_000_000;
const STALL_WINDOW: usize = 200;

pub(crate) fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// `L_ij = A_ij exp(phi(ij))`, stored as logarithms so that large tilts
/// neither overflow nor flush small entries to zero.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    log_entries: Vec<Vec<f64>>,
}

/// Perron root and vectors, all on a log scale.
#[derive(Clone, Debug)]
pub struct Perron {
    pub log_root: f64,
    /// `log v` with `max v = 1`.
    pub right: Vec<f64>,
    /// `log u` with `max u = 1`.
    pub left: Vec<f64>,
    /// `max_i |(Lv)_i / lambda - v_i|` with `max v = 1`.
    pub residual: f64,
    pub iterations: usize,
}

impl TransferMatrix {
    pub fn new(sft: &Sft, phi: &LocallyConstantPotential) -> Result<Self> {
        if phi.range() > 2 {
            return Err(Error::Contract("transfer matrix needs a potential of range <= 2".into()));
        }
        if phi.alphabet() != sft.alphabet() {
            return Err(Error::Contract("potential and shift alphabets differ".into()));
        }
        let n = sft.alphabet();
        let log_entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if sft.allows(i, j) {
                            phi.edge_value(i, j)
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(TransferMatrix { log_entries })
    }

    pub fn size(&self) -> usize {
        self.log_entries.len()
    }

    pub fn log_entry(&self, i: usize, j: usize) -> f64 {
        self.log_entries[i][j]
    }

    pub fn entries(&self) -> Vec<Vec<f64>> {
        self.log_entries
            .iter()
            .map(|r| r.iter().map(|x| x.exp()).collect())
            .collect()
    }

    fn transposed(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.log_entries[j][i]).collect())
            .collect()
    }

    /// Perron data of an irreducible matrix by power iteration on
    /// `L + c I`, with `c` the exponential of the maximal cycle mean so the
    /// iteration also converges for periodic matrices.
    pub fn perron(&self) -> Result<Perron> {
        let n = self.size();
        let shift = max_cycle_mean(n, |i, j| self.log_entries[i][j]);
        if !shift.is_finite() {
            return Err(Error::Domain("transfer matrix has no cycle".into()));
        }
        let (_, right, it_r) = power(&self.log_entries, shift)?;
        let (_, left, it_l) = power(&self.transposed(), shift)?;
        // Row quotient (Lv)_i / v_i at the largest entry of v. Unlike
        // mu - exp(shift) this has no cancellation, and it is exact for
        // constant row sums.
        let top = (0..n).max_by(|&a, &b| right[a].total_cmp(&right[b])).expect("nonempty matrix");
        let log_root = log_sum_exp((0..n).map(|j| self.log_entries[top][j] + right[j])) - right[top];
        let residual = (0..n)
            .map(|i| {
                let lv = log_sum_exp((0..n).map(|j| self.log_entries[i][j] + right[j]));
                ((lv - log_root).exp() - right[i].exp()).abs()
            })
            .fold(0.0, f64::max);
        Ok(Perron {
            log_root,
            right,
            left,
            residual,
            iterations: it_r.max(it_l),
        })
    }
}

/// Returns `(log mu, log v, iterations)` for the leading eigenpair of
/// `exp(log_m) + exp(shift) I`.
fn power(log_m: &[Vec<f64>], shift: f64) -> Result<(f64, Vec<f64>, usize)> {
    let n = log_m.len();
    let mut v = vec![0.0; n];
    let mut best_gap = f64::INFINITY;
    let mut since_best = 0;
    let mut estimate = 0.0;
    for it in 1..=MAX_ITERATIONS {
        let w: Vec<f64> = (0..n)
            .map(|i| {
                log_sum_exp(
                    (0..n)
                        .map(|j| log_m[i][j] + v[j])
                        .chain(std::iter::once(shift + v[i])),
                )
            })
            .collect();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let r = w[i] - v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        v = w.iter().map(|x| x - top).collect();
        estimate = 0.5 * (lo + hi);
        let gap = hi - lo;
        if gap <= PERRON_TOL * estimate.abs().max(1.0) {
            return Ok((estimate, v, it));
        }
        if gap < best_gap * (1.0 - 1e-3) {
            best_gap = gap;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > STALL_WINDOW && best_gap < 1e-12 {
                // rounding floor reached
                return Ok((estimate, v, it));
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        best_value: estimate,
        gradient_norm: best_gap,
    })
}
