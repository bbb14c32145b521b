use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::family::{StarFlag, StarResult};
use crate::classic::{
    classical_pressure, component_pressure, critical_shift, joint_range_two, max_cycle_mean,
    min_cycle_mean,
};
use crate::measures::{integrate, LocallyConstantPotential, MarkovMeasure};
use crate::par::{self, Execution};
use crate::spectrum::{SpectrumCurve, SpectrumSample};
use crate::symbolic::Sft;
use crate::{Error, Result};

const Q_TOL: f64 = 1e-10;
const Q_MAX: f64 = (1u64 << 20) as f64;

/// The Birkhoff level set `K_alpha` of `phi`, with the interval of levels
/// reachable by invariant measures.
#[derive(Clone, Debug)]
pub struct LevelSet {
    pub phi: LocallyConstantPotential,
    pub alpha: f64,
    pub interval: (f64, f64),
}

impl LevelSet {
    pub fn new(sft: &Sft, phi: LocallyConstantPotential, alpha: f64) -> Result<Self> {
        let interval = achievable_interval(sft, &phi)?;
        Ok(LevelSet { phi, alpha, interval })
    }

    pub fn is_empty(&self) -> bool {
        let tol = boundary_tol(self.alpha);
        self.alpha < self.interval.0 - tol || self.alpha > self.interval.1 + tol
    }
}

/// `[min int phi, max int phi]` over invariant measures: extreme cycle means.
pub fn achievable_interval(sft: &Sft, phi: &LocallyConstantPotential) -> Result<(f64, f64)> {
    let (recoding, pots) = joint_range_two(sft, &[phi])?;
    let shift = recoding.as_ref().map(|r| &r.sft).unwrap_or(sft);
    let w = edge_weights(shift, &pots[0]);
    let n = shift.alphabet();
    Ok((min_cycle_mean(n, |i, j| w[i][j]), max_cycle_mean(n, |i, j| w[i][j])))
}

fn edge_weights(sft: &Sft, phi: &LocallyConstantPotential) -> Vec<Vec<f64>> {
    let n = sft.alphabet();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if sft.allows(i, j) { phi.edge_value(i, j) } else { f64::NEG_INFINITY })
                .collect()
        })
        .collect()
}

fn boundary_tol(alpha: f64) -> f64 {
    1e-12 * alpha.abs().max(1.0)
}

struct Prepared {
    shift: Sft,
    phi: LocallyConstantPotential,
    psi: LocallyConstantPotential,
    recoded: bool,
    interval: (f64, f64),
}

fn prepare(sft: &Sft, phi: &LocallyConstantPotential, psi: &LocallyConstantPotential) -> Result<Prepared> {
    if !sft.is_irreducible() {
        return Err(Error::Reducible {
            components: sft.irreducible_components(),
        });
    }
    let (recoding, mut pots) = joint_range_two(sft, &[phi, psi])?;
    let psi2 = pots.pop().unwrap();
    let phi2 = pots.pop().unwrap();
    let shift = recoding.map(|r| r.sft).unwrap_or_else(|| sft.clone());
    let w = edge_weights(&shift, &phi2);
    let n = shift.alphabet();
    let interval = (min_cycle_mean(n, |i, j| w[i][j]), max_cycle_mean(n, |i, j| w[i][j]));
    Ok(Prepared {
        recoded: shift != *sft,
        shift,
        phi: phi2,
        psi: psi2,
        interval,
    })
}

enum Position {
    Outside,
    Lower,
    Upper,
    Interior,
}

fn locate(p: &Prepared, alpha: f64) -> Position {
    let tol = boundary_tol(alpha);
    let (lo, hi) = p.interval;
    if alpha < lo - tol || alpha > hi + tol {
        Position::Outside
    } else if (alpha - hi).abs() <= tol {
        Position::Upper
    } else if (alpha - lo).abs() <= tol {
        Position::Lower
    } else {
        Position::Interior
    }
}

/// Edges carrying every measure with `int phi` at the chosen end of the
/// interval. Such measures all have the extreme integral, so the level
/// set pressure there is ordinary pressure on this subshift.
fn extreme_shift(p: &Prepared, upper: bool) -> Result<Sft> {
    let sign = if upper { 1.0 } else { -1.0 };
    let lambda = if upper { p.interval.1 } else { -p.interval.0 };
    let w = edge_weights(&p.shift, &p.phi);
    critical_shift(&p.shift, |i, j| sign * w[i][j], lambda, 1e-12 * lambda.abs().max(1.0))
}

fn on_subshift(sub: &Sft, pot: &LocallyConstantPotential) -> Result<LocallyConstantPotential> {
    LocallyConstantPotential::from_fn(sub, pot.range(), |w| pot.value(w).expect("edge kept from the parent shift"))
}

fn boundary_dual(p: &Prepared, upper: bool) -> Result<StarResult> {
    let crit = extreme_shift(p, upper)?;
    let psi = on_subshift(&crit, &p.psi)?;
    let mut best: Option<(f64, MarkovMeasure)> = None;
    for (comp, r) in component_pressure(&crit, &psi)? {
        if best.as_ref().is_none_or(|b| r.value > b.0) {
            let mu = crate::classic::embed(&r.equilibrium.expect("irreducible component"), &comp, &p.shift)?;
            best = Some((r.value, mu));
        }
    }
    let (value, mu) = best.expect("an extreme cycle exists");
    Ok(finish(p, value, Some(mu), None, vec![StarFlag::Boundary]))
}

fn finish(p: &Prepared, value: f64, mu: Option<MarkovMeasure>, q: Option<f64>, mut flags: Vec<StarFlag>) -> StarResult {
    if p.recoded {
        flags.push(StarFlag::Recoded);
    }
    StarResult {
        value,
        maximizer: mu,
        charges_z: None,
        q_star: q,
        flags,
    }
}

struct Tilt {
    value: f64,
    derivative: f64,
    mu: MarkovMeasure,
}

fn tilt(p: &Prepared, q: f64, alpha: f64) -> Result<Tilt> {
    let pot = p.psi.combine(1.0, &p.phi, q, &p.shift)?;
    let r = classical_pressure(&p.shift, &pot)?;
    let mu = r.equilibrium.expect("irreducible shift");
    let m = integrate(&p.phi, &mu)?;
    Ok(Tilt {
        value: r.value - q * alpha,
        derivative: m - alpha,
        mu,
    })
}

/// `inf_q P(q phi + psi) - q alpha`, located by bisection on the sign of
/// the derivative `int phi dmu_q - alpha`.
pub fn level_set_pressure_dual(
    sft: &Sft,
    phi: &LocallyConstantPotential,
    psi: &LocallyConstantPotential,
    alpha: f64,
) -> Result<StarResult> {
    let p = prepare(sft, phi, psi)?;
    match locate(&p, alpha) {
        Position::Outside => return Ok(finish(&p, psi.inf(), None, None, vec![StarFlag::EmptyFamily])),
        Position::Upper => return boundary_dual(&p, true),
        Position::Lower => return boundary_dual(&p, false),
        Position::Interior => {}
    }
    let at0 = tilt(&p, 0.0, alpha)?;
    if at0.derivative == 0.0 {
        return Ok(finish(&p, at0.value, Some(at0.mu), Some(0.0), Vec::new()));
    }
    // the derivative increases with q; the root lies against its sign at 0
    let dir = -at0.derivative.signum();
    let same_side = |t: &Tilt| t.derivative.signum() == at0.derivative.signum();
    let mut inner = 0.0;
    let mut outer = dir;
    loop {
        let t = tilt(&p, outer, alpha)?;
        if !same_side(&t) {
            break;
        }
        if outer.abs() >= Q_MAX {
            return Ok(finish(
                &p,
                t.value,
                Some(t.mu),
                Some(outer),
                vec![StarFlag::SupremumPossiblyNotAttained],
            ));
        }
        inner = outer;
        outer *= 2.0;
    }
    while (outer - inner).abs() > Q_TOL * inner.abs().max(1.0) {
        let mid = 0.5 * (inner + outer);
        let t = tilt(&p, mid, alpha)?;
        if t.derivative == 0.0 {
            inner = mid;
            outer = mid;
        } else if same_side(&t) {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    let q = 0.5 * (inner + outer);
    let t = tilt(&p, q, alpha)?;
    Ok(finish(&p, t.value, Some(t.mu), Some(q), Vec::new()))
}

#[derive(Clone, Debug)]
pub struct PrimalParams {
    pub max_iterations: usize,
    pub restarts: usize,
    /// Target norm of the KKT residual.
    pub tol: f64,
    pub seed: u64,
}

impl Default for PrimalParams {
    fn default() -> Self {
        PrimalParams {
            max_iterations: 10_000,
            restarts: 3,
            tol: 1e-12,
            seed: 0,
        }
    }
}

/// Direct maximization of `h_mu + int psi` over Markov measures with
/// `int phi = alpha`, as a cross-check on the dual.
///
/// The unknowns are the edge masses `p_ij = pi_i P_ij`; entropy is concave
/// in them and the constraints (total mass, flow balance, level) are linear,
/// so an infeasible-start Newton iteration on the KKT system converges
/// from any positive start.
pub fn level_set_pressure_primal(
    sft: &Sft,
    phi: &LocallyConstantPotential,
    psi: &LocallyConstantPotential,
    alpha: f64,
    params: &PrimalParams,
) -> Result<StarResult> {
    let p = prepare(sft, phi, psi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    match locate(&p, alpha) {
        Position::Outside => Ok(finish(&p, psi.inf(), None, None, vec![StarFlag::EmptyFamily])),
        Position::Interior => {
            let (value, mu) = maximize_flow(&p.shift, &p.psi, Some((&p.phi, alpha)), params, &mut rng)?;
            Ok(finish(&p, value, Some(mu), None, Vec::new()))
        }
        pos => {
            let crit = extreme_shift(&p, matches!(pos, Position::Upper))?;
            let mut best: Option<(f64, MarkovMeasure)> = None;
            for comp in crit.irreducible_components() {
                let sub = crit.restrict(&comp)?;
                let psi_sub = crate::classic::restrict_potential(&p.psi, &comp, &sub)?;
                let (v, mu) = maximize_flow(&sub, &psi_sub, None, params, &mut rng)?;
                if best.as_ref().is_none_or(|b| v > b.0) {
                    best = Some((v, crate::classic::embed(&mu, &comp, &p.shift)?));
                }
            }
            let (value, mu) = best.expect("an extreme cycle exists");
            Ok(finish(&p, value, Some(mu), None, vec![StarFlag::Boundary]))
        }
    }
}

struct FlowProblem {
    n: usize,
    edges: Vec<(usize, usize)>,
    psi: Vec<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl FlowProblem {
    fn new(sft: &Sft, psi: &LocallyConstantPotential, level: Option<(&LocallyConstantPotential, f64)>) -> Self {
        let n = sft.alphabet();
        let edges: Vec<(usize, usize)> = sft.edges().collect();
        let m = edges.len();
        let rows = 1 + (n - 1) + level.is_some() as usize;
        let mut a = DMatrix::zeros(rows, m);
        let mut b = DVector::zeros(rows);
        b[0] = 1.0;
        for (e, &(i, j)) in edges.iter().enumerate() {
            a[(0, e)] = 1.0;
            if j + 1 < n {
                a[(1 + j, e)] += 1.0;
            }
            if i + 1 < n {
                a[(1 + i, e)] -= 1.0;
            }
            if let Some((phi, _)) = level {
                a[(n, e)] = phi.edge_value(i, j);
            }
        }
        if let Some((_, alpha)) = level {
            b[n] = alpha;
        }
        FlowProblem {
            n,
            psi: edges.iter().map(|&(i, j)| psi.edge_value(i, j)).collect(),
            edges,
            a,
            b,
        }
    }

    fn out_mass(&self, x: &DVector<f64>) -> Vec<f64> {
        let mut pi = vec![0.0; self.n];
        for (e, &(i, _)) in self.edges.iter().enumerate() {
            pi[i] += x[e];
        }
        pi
    }

    fn objective(&self, x: &DVector<f64>) -> f64 {
        let pi = self.out_mass(x);
        self.edges
            .iter()
            .enumerate()
            .map(|(e, &(i, _))| x[e] * (-(x[e] / pi[i]).ln() + self.psi[e]))
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let pi = self.out_mass(x);
        DVector::from_iterator(
            x.len(),
            self.edges
                .iter()
                .enumerate()
                .map(|(e, &(i, _))| -(x[e] / pi[i]).ln() + self.psi[e]),
        )
    }

    /// Negative Hessian of the objective (positive semidefinite).
    fn curvature(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let pi = self.out_mass(x);
        let m = x.len();
        let mut k = DMatrix::zeros(m, m);
        for (e, &(i, _)) in self.edges.iter().enumerate() {
            k[(e, e)] += 1.0 / x[e];
            for (f, &(i2, _)) in self.edges.iter().enumerate() {
                if i == i2 {
                    k[(e, f)] -= 1.0 / pi[i];
                }
            }
        }
        k
    }

    fn residual(&self, x: &DVector<f64>, nu: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let dual = -self.gradient(x) + self.a.transpose() * nu;
        let primal = &self.a * x - &self.b;
        (dual, primal)
    }
}

fn norm(r: &(DVector<f64>, DVector<f64>)) -> f64 {
    (r.0.norm_squared() + r.1.norm_squared()).sqrt()
}

fn maximize_flow(
    sft: &Sft,
    psi: &LocallyConstantPotential,
    level: Option<(&LocallyConstantPotential, f64)>,
    params: &PrimalParams,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, MarkovMeasure)> {
    let prob = FlowProblem::new(sft, psi, level);
    let m = prob.edges.len();
    let c = prob.b.len();
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut fallback = (f64::NEG_INFINITY, f64::INFINITY, 0usize);
    for _ in 0..params.restarts.max(1) {
        let mut x = DVector::from_iterator(m, (0..m).map(|_| rng.random_range(0.5..1.5)));
        x /= x.sum();
        let mut nu = DVector::zeros(c);
        let mut converged = false;
        let mut it = 0;
        while it < params.max_iterations {
            it += 1;
            let r = prob.residual(&x, &nu);
            let rn = norm(&r);
            if rn <= params.tol {
                converged = true;
                break;
            }
            let mut kkt = DMatrix::zeros(m + c, m + c);
            kkt.view_mut((0, 0), (m, m)).copy_from(&prob.curvature(&x));
            kkt.view_mut((0, m), (m, c)).copy_from(&prob.a.transpose());
            kkt.view_mut((m, 0), (c, m)).copy_from(&prob.a);
            let mut rhs = DVector::zeros(m + c);
            rhs.rows_mut(0, m).copy_from(&(-&r.0));
            rhs.rows_mut(m, c).copy_from(&(-&r.1));
            let Some(step) = kkt.lu().solve(&rhs) else { break };
            let dx = step.rows(0, m).into_owned();
            let dnu = step.rows(m, c).into_owned();
            let mut t = 1.0;
            while (0..m).any(|e| x[e] + t * dx[e] <= 0.0) {
                t *= 0.5;
            }
            loop {
                let (xn, nun) = (&x + t * &dx, &nu + t * &dnu);
                if norm(&prob.residual(&xn, &nun)) <= (1.0 - 0.01 * t) * rn || t < 1e-14 {
                    x = xn;
                    nu = nun;
                    break;
                }
                t *= 0.5;
            }
            if t < 1e-14 {
                // no progress possible at machine precision
                converged = norm(&prob.residual(&x, &nu)) <= params.tol.max(1e-9);
                break;
            }
        }
        let value = prob.objective(&x);
        if converged {
            if best.as_ref().is_none_or(|b| value > b.0) {
                best = Some((value, x));
            }
        } else {
            fallback = (value, norm(&prob.residual(&x, &nu)), it);
        }
    }
    let Some((value, x)) = best else {
        return Err(Error::NonConvergence {
            iterations: fallback.2,
            best_value: fallback.0,
            gradient_norm: fallback.1,
        });
    };
    let pi = prob.out_mass(&x);
    let n = prob.n;
    let mut kernel = vec![vec![0.0; n]; n];
    for (e, &(i, j)) in prob.edges.iter().enumerate() {
        kernel[i][j] = x[e] / pi[i];
    }
    for row in kernel.iter_mut() {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
    let total: f64 = pi.iter().sum();
    let pi: Vec<f64> = pi.iter().map(|v| v / total).collect();
    let mu = MarkovMeasure::new(kernel.clone(), pi).or_else(|_| MarkovMeasure::from_kernel(kernel))?;
    Ok((value, mu))
}

/// Dual level-set values over a grid of levels, evaluated in parallel.
pub fn level_set_spectrum(
    sft: &Sft,
    phi: &LocallyConstantPotential,
    psi: &LocallyConstantPotential,
    alphas: &[f64],
    exec: Execution,
) -> Result<SpectrumCurve> {
    let results = par::map(exec, alphas, |&a| level_set_pressure_dual(sft, phi, psi, a));
    let mut samples = Vec::with_capacity(alphas.len());
    for (&alpha, r) in alphas.iter().zip(results) {
        let r = r?;
        let maximizer_id = if r.has_flag(StarFlag::EmptyFamily) {
            "empty".to_string()
        } else if r.has_flag(StarFlag::Boundary) {
            "boundary".to_string()
        } else {
            format!("gibbs q={}", r.q_star.unwrap_or(f64::NAN))
        };
        samples.push(SpectrumSample {
            alpha,
            value: r.value,
            q_star: r.q_star.unwrap_or(f64::NAN),
            maximizer_id,
            flagged: r.has_flag(StarFlag::EmptyFamily) || r.has_flag(StarFlag::SupremumPossiblyNotAttained),
        });
    }
    Ok(SpectrumCurve { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::entropy;

    fn h(p: f64) -> f64 {
        -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
    }

    #[test]
    fn dual_examples() {
        let full = Sft::full(2);
        let phi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
        let zero = LocallyConstantPotential::zero(&full);
        let r = level_set_pressure_dual(&full, &phi, &zero, 0.5).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
        assert_eq!(r.q_star, Some(0.0));
        let r = level_set_pressure_dual(&full, &phi, &zero, 0.25).unwrap();
        assert!((r.value - h(0.25)).abs() < 1e-10, "{}", r.value);
        let mu = r.maximizer.unwrap();
        assert!((mu.stationary()[1] - 0.25).abs() < 1e-8);
        let r = level_set_pressure_dual(&full, &phi, &zero, 1.0).unwrap();
        assert!(r.value.abs() < 1e-12 && r.has_flag(StarFlag::Boundary));
        assert_eq!(r.maximizer.unwrap(), MarkovMeasure::fixed_point(&full, 1).unwrap());
        let r = level_set_pressure_dual(&full, &phi, &zero, 1.5).unwrap();
        assert!(r.has_flag(StarFlag::EmptyFamily) && r.value == 0.0);
    }

    #[test]
    fn primal_examples() {
        let full = Sft::full(2);
        let phi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
        let zero = LocallyConstantPotential::zero(&full);
        let params = PrimalParams::default();
        let r = level_set_pressure_primal(&full, &phi, &zero, 0.5, &params).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-10);
        let r = level_set_pressure_primal(&full, &phi, &zero, 0.25, &params).unwrap();
        assert!((r.value - h(0.25)).abs() < 1e-10);
        let golden = Sft::golden_mean();
        let one = LocallyConstantPotential::symbol_values(&golden, &[0.0, 1.0]).unwrap();
        let r = level_set_pressure_primal(&golden, &one, &LocallyConstantPotential::zero(&golden), 0.0, &params)
            .unwrap();
        assert!(r.value.abs() < 1e-12);
        assert_eq!(r.maximizer.unwrap().stationary(), &[1.0, 0.0]);
    }

    #[test]
    fn primal_matches_dual_range_two() {
        let golden = Sft::golden_mean();
        let phi = LocallyConstantPotential::pair_values(&golden, &[vec![0.3, -0.4], vec![1.2, 0.0]]).unwrap();
        let psi = LocallyConstantPotential::pair_values(&golden, &[vec![-0.1, 0.5], vec![0.2, 0.0]]).unwrap();
        let (lo, hi) = achievable_interval(&golden, &phi).unwrap();
        for k in 1..10 {
            let alpha = lo + (hi - lo) * k as f64 / 10.0;
            let d = level_set_pressure_dual(&golden, &phi, &psi, alpha).unwrap();
            let p = level_set_pressure_primal(&golden, &phi, &psi, alpha, &PrimalParams::default()).unwrap();
            assert!((d.value - p.value).abs() < 1e-8, "alpha {alpha}: {} vs {}", d.value, p.value);
            let mu = d.maximizer.unwrap();
            assert!((integrate(&phi, &mu).unwrap() - alpha).abs() < 1e-8);
            let v = entropy(&mu) + integrate(&psi, &mu).unwrap();
            assert!((v - d.value).abs() < 1e-8);
        }
    }
}
