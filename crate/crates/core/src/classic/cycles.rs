use crate::symbolic::Sft;
use crate::Result;

/// Maximal mean weight of a cycle (Karp). Absent edges carry `-inf`.
/// Returns `-inf` for an acyclic graph.
pub fn max_cycle_mean<W: Fn(usize, usize) -> f64>(n: usize, w: W) -> f64 {
    // d[k][v]: heaviest walk with k edges ending at v, starting anywhere
    let mut d = vec![vec![f64::NEG_INFINITY; n]; n + 1];
    d[0] = vec![0.0; n];
    for k in 1..=n {
        for v in 0..n {
            let mut best = f64::NEG_INFINITY;
            for u in 0..n {
                let e = w(u, v);
                if e > f64::NEG_INFINITY && d[k - 1][u] > f64::NEG_INFINITY {
                    best = best.max(d[k - 1][u] + e);
                }
            }
            d[k][v] = best;
        }
    }
    let mut out = f64::NEG_INFINITY;
    for v in 0..n {
        if d[n][v] == f64::NEG_INFINITY {
            continue;
        }
        let mut worst = f64::INFINITY;
        for k in 0..n {
            if d[k][v] > f64::NEG_INFINITY {
                worst = worst.min((d[n][v] - d[k][v]) / (n - k) as f64);
            }
        }
        out = out.max(worst);
    }
    out
}

/// Minimal mean weight of a cycle; absent edges still carry `-inf`.
pub fn min_cycle_mean<W: Fn(usize, usize) -> f64>(n: usize, w: W) -> f64 {
    -max_cycle_mean(n, |i, j| {
        let x = w(i, j);
        if x == f64::NEG_INFINITY {
            x
        } else {
            -x
        }
    })
}

/// Shift on the edges that can carry a measure of maximal mean weight
/// `lambda`: those tight for a longest-path sub-action. Every invariant
/// measure supported there has mean weight exactly `lambda`, and every
/// maximizing measure is supported there.
pub fn critical_shift<W: Fn(usize, usize) -> f64>(sft: &Sft, w: W, lambda: f64, tol: f64) -> Result<Sft> {
    let n = sft.alphabet();
    // h_j = sup over walks ending at j of sum (w - lambda): finite since no
    // cycle has positive reduced weight.
    let mut h = vec![0.0; n];
    for _ in 0..=n {
        let mut changed = false;
        for (i, j) in sft.edges() {
            let cand = h[i] + w(i, j) - lambda;
            if cand > h[j] + 1e-15 {
                h[j] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut matrix = vec![vec![0u8; n]; n];
    for (i, j) in sft.edges() {
        if h[i] + w(i, j) - lambda >= h[j] - tol {
            matrix[i][j] = 1;
        }
    }
    Sft::from_matrix(matrix)
}
