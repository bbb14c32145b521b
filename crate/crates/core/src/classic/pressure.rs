use super::transfer::{Perron, TransferMatrix};
use crate::measures::{LocallyConstantPotential, MarkovMeasure};
use crate::symbolic::{recode_higher_block, BlockRecoding, Sft};
use crate::{Error, Result};

/// Classical pressure with its equilibrium state.
#[derive(Clone, Debug)]
pub struct PressureResult {
    pub value: f64,
    pub eigen_residual: f64,
    pub equilibrium: Option<MarkovMeasure>,
    /// Present when the potential had range above 2; the equilibrium then
    /// lives on this higher-block shift.
    pub recoding: Option<BlockRecoding>,
}

/// `log` of the Perron root of the transfer matrix, with the Gibbs/Parry
/// Markov measure built from both Perron vectors.
pub fn classical_pressure(sft: &Sft, phi: &LocallyConstantPotential) -> Result<PressureResult> {
    if phi.alphabet() != sft.alphabet() {
        return Err(Error::Contract("potential and shift alphabets differ".into()));
    }
    if !sft.is_irreducible() {
        return Err(Error::Reducible {
            components: sft.irreducible_components(),
        });
    }
    let (recoding, phi2) = phi.to_range_two(sft)?;
    let shift = recoding.as_ref().map(|r| &r.sft).unwrap_or(sft);
    if !shift.is_irreducible() {
        return Err(Error::Reducible {
            components: shift.irreducible_components(),
        });
    }
    let tm = TransferMatrix::new(shift, &phi2)?;
    let perron = tm.perron()?;
    let equilibrium = gibbs_measure(&tm, &perron)?;
    Ok(PressureResult {
        value: perron.log_root,
        eigen_residual: perron.residual,
        equilibrium: Some(equilibrium),
        recoding,
    })
}

/// `P_ij = L_ij v_j / (lambda v_i)`, `pi_i ~ u_i v_i`.
fn gibbs_measure(tm: &TransferMatrix, p: &Perron) -> Result<MarkovMeasure> {
    let n = tm.size();
    let mut kernel = vec![vec![0.0; n]; n];
    for (i, row) in kernel.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (tm.log_entry(i, j) + p.right[j] - p.log_root - p.right[i]).exp();
        }
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    let logs: Vec<f64> = (0..n).map(|i| p.left[i] + p.right[i]).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut pi: Vec<f64> = logs.iter().map(|x| (x - top).exp()).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    MarkovMeasure::new(kernel.clone(), pi).or_else(|_| MarkovMeasure::from_kernel(kernel))
}

/// Pressure on every irreducible component, with the component's symbols.
/// The pressure of the whole (possibly reducible) shift is the maximum.
pub fn component_pressure(
    sft: &Sft,
    phi: &LocallyConstantPotential,
) -> Result<Vec<(Vec<usize>, PressureResult)>> {
    sft.irreducible_components()
        .into_iter()
        .map(|comp| {
            let sub = sft.restrict(&comp)?;
            let phi_sub = restrict_potential(phi, &comp, &sub)?;
            Ok((comp, classical_pressure(&sub, &phi_sub)?))
        })
        .collect()
}

/// Potential on `sub`, the restriction of the shift to `symbols`.
pub fn restrict_potential(
    phi: &LocallyConstantPotential,
    symbols: &[usize],
    sub: &Sft,
) -> Result<LocallyConstantPotential> {
    LocallyConstantPotential::from_fn(sub, phi.range(), |w| {
        let orig: Vec<usize> = w.iter().map(|&s| symbols[s]).collect();
        phi.value(&orig).expect("restriction keeps admissible windows")
    })
}

/// Several potentials rewritten on one shift where all have range <= 2.
pub fn joint_range_two(
    sft: &Sft,
    pots: &[&LocallyConstantPotential],
) -> Result<(Option<BlockRecoding>, Vec<LocallyConstantPotential>)> {
    let r = pots.iter().map(|p| p.range()).max().unwrap_or(1);
    if r <= 2 {
        return Ok((None, pots.iter().map(|p| (*p).clone()).collect()));
    }
    let recoding = recode_higher_block(sft, r - 1)?;
    let out = pots
        .iter()
        .map(|p| p.lift(sft, r)?.pullback(&recoding))
        .collect::<Result<Vec<_>>>()?;
    Ok((Some(recoding), out))
}

/// Measure on a sub-alphabet viewed on the full alphabet. Rows of unused
/// symbols are filled with a uniform choice of successors.
pub(crate) fn embed(mu: &MarkovMeasure, symbols: &[usize], sft: &Sft) -> Result<MarkovMeasure> {
    let n = sft.alphabet();
    let mut kernel = vec![vec![0.0; n]; n];
    let mut pi = vec![0.0; n];
    let mut used = vec![false; n];
    for (a, &s) in symbols.iter().enumerate() {
        used[s] = true;
        pi[s] = mu.stationary()[a];
        for (b, &t) in symbols.iter().enumerate() {
            kernel[s][t] = mu.kernel()[a][b];
        }
    }
    for i in 0..n {
        if !used[i] {
            let succ: Vec<usize> = sft.successors(i).collect();
            if succ.is_empty() {
                kernel[i][i] = 1.0;
            }
            for &j in &succ {
                kernel[i][j] = 1.0 / succ.len() as f64;
            }
        }
    }
    MarkovMeasure::new(kernel, pi)
}
