use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::par::{self, Execution};
use crate::spectrum::{SpectrumCurve, SpectrumSample};
use crate::{Error, Result};

const MAX_DEPTH: usize = 28;
const SPLIT_DEPTH: usize = 10;
const REFERENCE: f64 = 0.5;

/// `f(x) = x + x^(1+s) mod 1` on `[0, 1)`: two full increasing branches
/// and a neutral fixed point at 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MpMap {
    s: f64,
}

impl MpMap {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("parameter s = {s} must lie in (0, 1)")));
        }
        Ok(MpMap { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn apply(&self, x: f64) -> f64 {
        let y = x + x.powf(1.0 + self.s);
        if y >= 1.0 {
            y - 1.0
        } else {
            y
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        1.0 + (1.0 + self.s) * x.powf(self.s)
    }

    /// Point where the first branch reaches 1.
    pub fn turning_point(&self) -> f64 {
        self.inverse(1, 0.0)
    }

    /// Preimage of `y` on branch 0 (the neutral one) or 1. Newton's method
    /// from the right converges monotonically since `x + x^(1+s)` is
    /// increasing and convex.
    pub fn inverse(&self, branch: usize, y: f64) -> f64 {
        let target = y + branch as f64;
        let mut x = if branch == 0 { y } else { 1.0 };
        for _ in 0..100 {
            let xs = x.powf(self.s);
            let g = x + x * xs - target;
            let step = g / (1.0 + (1.0 + self.s) * xs);
            let next = (x - step).max(0.0);
            if (x - next).abs() <= 1e-16 * x.max(1e-300) || next >= x {
                return next.min(x);
            }
            x = next;
        }
        x
    }
}

/// Estimates of `t -> P(-t log f')` from branch sums at depth `n` and `n/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureCurve {
    pub t: Vec<f64>,
    pub depth: usize,
    pub at_n: Vec<f64>,
    pub at_half: Vec<f64>,
    /// Largest change of `S_m log f'` across a depth-`m` cylinder, over
    /// the cylinders at `m = min(n, 12)`.
    pub distortion: f64,
}

impl PressureCurve {
    /// Zero of the depth-`n` curve by linear interpolation at the first
    /// sign change.
    pub fn root(&self) -> Option<f64> {
        (1..self.t.len()).find_map(|k| {
            let (a, b) = (self.at_n[k - 1], self.at_n[k]);
            if a >= 0.0 && b <= 0.0 && a != b {
                let (ta, tb) = (self.t[k - 1], self.t[k]);
                Some(ta + (tb - ta) * a / (a - b))
            } else if a == 0.0 {
                Some(self.t[k - 1])
            } else {
                None
            }
        })
    }

    /// Levels where the Legendre transform reproduces `h(alpha) = alpha`:
    /// from minus the slope on the last grid interval up to minus the slope
    /// on the interval just left of the root.
    pub fn identity_interval(&self) -> Option<(f64, f64)> {
        let root = self.root()?;
        let slope = |k: usize| -(self.at_n[k] - self.at_n[k - 1]) / (self.t[k] - self.t[k - 1]);
        let k = (1..self.t.len()).rev().find(|&k| self.t[k] <= root)?;
        let right = slope(k);
        let left = slope(self.t.len() - 1);
        (left < right).then_some((left, right))
    }
}

#[derive(Clone, Copy)]
struct Node {
    x: f64,
    s: f64,
}

fn children(map: &MpMap, n: Node) -> [Node; 2] {
    [0, 1].map(|b| {
        let x = map.inverse(b, n.x);
        Node {
            x,
            s: n.s + map.derivative(x).ln(),
        }
    })
}

fn expand(map: &MpMap, root: Node, levels: usize) -> Vec<Node> {
    let mut layer = vec![root];
    for _ in 0..levels {
        layer = layer.iter().flat_map(|&n| children(map, n)).collect();
    }
    layer
}

fn accumulate(map: &MpMap, node: Node, left: usize, t: &[f64], offset: &[f64], acc: &mut [f64]) {
    if left == 0 {
        for ((a, &tj), &cj) in acc.iter_mut().zip(t).zip(offset) {
            *a += (-tj * node.s - cj).exp();
        }
        return;
    }
    for c in children(map, node) {
        accumulate(map, c, left - 1, t, offset, acc);
    }
}

fn branch_sums(map: &MpMap, t: &[f64], n: usize, exec: Execution) -> Vec<f64> {
    // exponents are kept <= 0 using S_n <= n log(2 + s)
    let bound = n as f64 * (2.0 + map.s).ln();
    let offset: Vec<f64> = t.iter().map(|&tj| if tj < 0.0 { -tj * bound } else { 0.0 }).collect();
    let split = n.min(SPLIT_DEPTH);
    let tops = expand(map, Node { x: REFERENCE, s: 0.0 }, split);
    let parts = par::map(exec, &tops, |&node| {
        let mut acc = vec![0.0; t.len()];
        accumulate(map, node, n - split, t, &offset, &mut acc);
        acc
    });
    let mut total = vec![0.0; t.len()];
    for part in parts {
        for (a, p) in total.iter_mut().zip(part) {
            *a += p;
        }
    }
    total
        .iter()
        .zip(&offset)
        .map(|(&z, &c)| (z.ln() + c) / n as f64)
        .collect()
}

fn distortion(map: &MpMap, m: usize) -> f64 {
    let lo = expand(map, Node { x: 1e-12, s: 0.0 }, m);
    let hi = expand(map, Node { x: 1.0 - 1e-12, s: 0.0 }, m);
    lo.iter().zip(&hi).map(|(a, b)| (a.s - b.s).abs()).fold(0.0, f64::max)
}

/// `(1/n) log sum_w exp(-t S_n log f'(x_w))` over the `2^n` inverse-branch
/// words `w`, with `x_w` the preimage of a fixed reference point.
pub fn mp_pressure_curve(map: &MpMap, t_grid: &[f64], n: usize, exec: Execution) -> Result<PressureCurve> {
    if n < 2 || n > MAX_DEPTH {
        return Err(Error::Budget(format!("depth {n} outside 2..={MAX_DEPTH}")));
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("t grid must be increasing".into()));
    }
    Ok(PressureCurve {
        t: t_grid.to_vec(),
        depth: n,
        at_n: branch_sums(map, t_grid, n, exec),
        at_half: branch_sums(map, t_grid, n / 2, exec),
        distortion: distortion(map, n.min(12)),
    })
}

/// Legendre transform `alpha -> min_t P(t) + t alpha` of the sampled
/// curve; the Lyapunov spectrum, with `q = -t`.
pub fn mp_lyapunov_spectrum(curve: &PressureCurve, alphas: &[f64]) -> SpectrumCurve {
    let last = curve.t.len() - 1;
    let samples = alphas
        .iter()
        .map(|&alpha| {
            let (k, value) = curve
                .at_n
                .iter()
                .zip(&curve.t)
                .map(|(p, t)| p + t * alpha)
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty grid");
            SpectrumSample {
                alpha,
                value,
                q_star: -curve.t[k],
                maximizer_id: format!("tilt t={}", curve.t[k]),
                flagged: k == 0 || k == last,
            }
        })
        .collect();
    SpectrumCurve { samples }
}

/// Long-orbit estimate of the Lyapunov exponent of the absolutely
/// continuous invariant measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcipEstimate {
    /// Median over seeds.
    pub lambda: f64,
    pub spread: (f64, f64),
    pub samples: Vec<f64>,
    /// Entropy, equal to the exponent for an acip (Pesin's formula).
    pub entropy: f64,
    pub orbit_length: usize,
}

pub fn mp_acip_estimate(map: &MpMap, orbit_length: usize, seeds: &[u64], exec: Execution) -> Result<AcipEstimate> {
    if orbit_length == 0 || seeds.is_empty() {
        return Err(Error::Range("need a positive orbit length and at least one seed".into()));
    }
    let samples = par::map(exec, seeds, |&seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x: f64 = rng.random_range(0.0..1.0);
        let mut sum = 0.0;
        for _ in 0..orbit_length {
            sum += map.derivative(x).ln();
            x = map.apply(x);
            if x == 0.0 {
                // rounding landed on the fixed point; step off at float resolution
                x = f64::EPSILON;
            }
        }
        sum / orbit_length as f64
    });
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let lambda = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    Ok(AcipEstimate {
        lambda,
        spread: (sorted[0], sorted[sorted.len() - 1]),
        samples,
        entropy: lambda,
        orbit_length,
    })
}

/// The maximizer `p delta_0 + (1 - p) mu_acip` for the Lyapunov level `alpha`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MpEquilibrium {
    pub alpha: f64,
    pub p: f64,
    pub entropy: f64,
    pub components: Vec<(String, f64)>,
    /// Whether the measure gives the level set positive mass.
    pub charges_z: bool,
}

pub fn mp_star_equilibrium(alpha: f64, acip: &AcipEstimate) -> Result<MpEquilibrium> {
    let lambda = acip.lambda;
    if !(alpha >= 0.0 && alpha <= lambda) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, {lambda}]")));
    }
    let p = 1.0 - alpha / lambda;
    let entropy = (1.0 - p) * acip.entropy;
    // each ergodic component is carried by its own Lyapunov level set
    let tol = 1e-12 * lambda.max(1.0);
    let delta_hits = p > 0.0 && alpha.abs() <= tol;
    let acip_hits = p < 1.0 && (alpha - lambda).abs() <= tol;
    Ok(MpEquilibrium {
        alpha,
        p,
        entropy,
        components: vec![("delta_0".into(), p), ("acip".into(), 1.0 - p)],
        charges_z: delta_hits || acip_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_branches() {
        let m = MpMap::new(0.5).unwrap();
        for y in [0.0, 1e-9, 0.3, 0.999] {
            for b in 0..2 {
                let x = m.inverse(b, y);
                let back = x + x.powf(1.5) - b as f64;
                assert!((back - y).abs() < 1e-14, "b={b} y={y}");
            }
        }
        let c = m.turning_point();
        assert!((c + c.powf(1.5) - 1.0).abs() < 1e-14);
        assert!(MpMap::new(1.0).is_err());
    }

    #[test]
    fn curve_shape() {
        let m = MpMap::new(0.5).unwrap();
        let t: Vec<f64> = (0..=8).map(|k| k as f64 * 0.5).collect();
        let seq = mp_pressure_curve(&m, &t, 12, Execution::Sequential).unwrap();
        let parallel = mp_pressure_curve(&m, &t, 12, Execution::Parallel).unwrap();
        assert_eq!(seq, parallel);
        assert!((seq.at_n[0] - 2f64.ln()).abs() < 1e-12);
        assert!(seq.at_n.windows(2).all(|w| w[1] <= w[0]));
        assert!(seq.root().unwrap() > 0.8);
    }

    #[test]
    fn equilibrium_coefficients() {
        let acip = AcipEstimate {
            lambda: 0.6,
            spread: (0.6, 0.6),
            samples: vec![0.6],
            entropy: 0.6,
            orbit_length: 1,
        };
        let e = mp_star_equilibrium(0.3, &acip).unwrap();
        assert!((e.p - 0.5).abs() < 1e-15 && (e.entropy - 0.3).abs() < 1e-15);
        assert!(!e.charges_z);
        assert_eq!(mp_star_equilibrium(0.6, &acip).unwrap().p, 0.0);
        assert_eq!(mp_star_equilibrium(0.0, &acip).unwrap().p, 1.0);
        assert!(mp_star_equilibrium(0.7, &acip).is_err());
    }
}
