use serde::Serialize;

use super::level::{level_set_pressure_dual, LevelSet};
use crate::classic::classical_pressure;
use crate::measures::{
    cylinder_distance, entropy, limit_diagnostics, LimitDiagnostics, LocallyConstantPotential,
    MarkovMeasure,
};
use crate::symbolic::{is_mixing, PointSpec, Sft, Word};
use crate::{Error, Result};

/// How `V(x)` is read off a finite prefix.
#[derive(Clone, Debug)]
pub struct DiagnosticsConfig {
    /// Checkpoint times for the empirical measures.
    pub times: Vec<usize>,
    /// Cylinder depth, at least 2 so that pair frequencies are available.
    pub depth: usize,
    /// Cluster radius.
    pub tol: f64,
    /// Reference measures a cluster centroid snaps to when within `snap_tol`.
    pub catalog: Vec<MarkovMeasure>,
    pub snap_tol: f64,
}

impl DiagnosticsConfig {
    /// Doubling checkpoints from `2^10` up to `horizon`.
    pub fn doubling(horizon: usize) -> Self {
        let mut times = Vec::new();
        let mut t = 1024usize;
        while t <= horizon {
            times.push(t);
            t *= 2;
        }
        if times.last() != Some(&horizon) {
            times.push(horizon);
        }
        DiagnosticsConfig {
            times,
            depth: 2,
            tol: 0.05,
            catalog: Vec::new(),
            snap_tol: 0.05,
        }
    }

    pub fn with_catalog(mut self, catalog: Vec<MarkovMeasure>) -> Self {
        self.catalog = catalog;
        self
    }
}

#[derive(Clone, Debug)]
pub enum MeasureFamily {
    /// No measures at all: `P*` is the sentinel `inf psi`.
    Empty,
    AllInvariant,
    Single(MarkovMeasure),
    FiniteSet(Vec<MarkovMeasure>),
    LevelSet(LevelSet),
    EmpiricalClosure {
        points: Vec<PointSpec>,
        config: DiagnosticsConfig,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StarFlag {
    /// The family is empty and the value is the sentinel `inf psi`.
    EmptyFamily,
    /// The level lies at an end of the achievable interval.
    Boundary,
    SupremumPossiblyNotAttained,
    /// The potential was rewritten on a higher-block shift; the maximizer
    /// lives there.
    Recoded,
}

#[derive(Clone, Debug)]
pub struct StarResult {
    pub value: f64,
    pub maximizer: Option<MarkovMeasure>,
    pub charges_z: Option<bool>,
    pub q_star: Option<f64>,
    pub flags: Vec<StarFlag>,
}

impl StarResult {
    pub fn sentinel(psi: &LocallyConstantPotential) -> Self {
        StarResult {
            value: psi.inf(),
            maximizer: None,
            charges_z: None,
            q_star: None,
            flags: vec![StarFlag::EmptyFamily],
        }
    }

    fn of(value: f64, maximizer: MarkovMeasure) -> Self {
        StarResult {
            value,
            maximizer: Some(maximizer),
            charges_z: None,
            q_star: None,
            flags: Vec::new(),
        }
    }

    pub fn has_flag(&self, f: StarFlag) -> bool {
        self.flags.contains(&f)
    }
}

/// `int psi dmu` for a potential of any range.
pub fn expectation(mu: &MarkovMeasure, psi: &LocallyConstantPotential) -> Result<f64> {
    if psi.alphabet() != mu.size() {
        return Err(Error::Contract("potential and measure alphabets differ".into()));
    }
    let mut s = 0.0;
    for (w, p) in mu.cylinder_probabilities(psi.range()) {
        let v = psi
            .value(&w.0)
            .ok_or_else(|| Error::Domain(format!("measure charges inadmissible window {w}")))?;
        s += p * v;
    }
    Ok(s)
}

fn free_energy(mu: &MarkovMeasure, psi: &LocallyConstantPotential) -> Result<f64> {
    Ok(entropy(mu) + expectation(mu, psi)?)
}

fn best_of(measures: &[MarkovMeasure], psi: &LocallyConstantPotential) -> Result<Option<StarResult>> {
    let mut best: Option<StarResult> = None;
    for mu in measures {
        let v = free_energy(mu, psi)?;
        if best.as_ref().is_none_or(|b| v > b.value) {
            best = Some(StarResult::of(v, mu.clone()));
        }
    }
    Ok(best)
}

pub fn star_pressure(sft: &Sft, family: &MeasureFamily, psi: &LocallyConstantPotential) -> Result<StarResult> {
    match family {
        MeasureFamily::Empty => Ok(StarResult::sentinel(psi)),
        MeasureFamily::AllInvariant => {
            let p = classical_pressure(sft, psi)?;
            let mut r = StarResult::of(p.value, p.equilibrium.expect("irreducible shift"));
            if p.recoding.is_some() {
                r.flags.push(StarFlag::Recoded);
            }
            Ok(r)
        }
        MeasureFamily::Single(mu) => {
            mu.check_compatible(sft)?;
            Ok(StarResult::of(free_energy(mu, psi)?, mu.clone()))
        }
        MeasureFamily::FiniteSet(list) => {
            if list.is_empty() {
                return Err(Error::Contract("finite family must be nonempty".into()));
            }
            for mu in list {
                mu.check_compatible(sft)?;
            }
            Ok(best_of(list, psi)?.expect("nonempty family"))
        }
        MeasureFamily::LevelSet(level) => level_set_pressure_dual(sft, &level.phi, psi, level.alpha),
        MeasureFamily::EmpiricalClosure { points, config } => {
            let measures = empirical_limit_measures(sft, points, config, false)?;
            Ok(best_of(&measures, psi)?.unwrap_or_else(|| StarResult::sentinel(psi)))
        }
    }
}

/// Markov measures standing in for `V(x)`, one per cluster of each point.
/// With `convergent_only`, points with more than one cluster are dropped.
fn empirical_limit_measures(
    sft: &Sft,
    points: &[PointSpec],
    config: &DiagnosticsConfig,
    convergent_only: bool,
) -> Result<Vec<MarkovMeasure>> {
    let mut out = Vec::new();
    for x in points {
        let d = limit_diagnostics(sft, x, &config.times, config.depth, config.tol)?;
        if convergent_only && !d.converges() {
            continue;
        }
        out.extend(cluster_measures(sft, &d, config)?);
    }
    Ok(out)
}

fn cluster_measures(sft: &Sft, d: &LimitDiagnostics, config: &DiagnosticsConfig) -> Result<Vec<MarkovMeasure>> {
    d.clusters
        .iter()
        .map(|c| {
            for mu in &config.catalog {
                if cylinder_distance(mu, &c.centroid, d.depth)? <= config.snap_tol {
                    return Ok(mu.clone());
                }
            }
            match_markov(sft, &c.centroid)
        })
        .collect()
}

/// One-step Markov measure with the pair frequencies of a cylinder
/// distribution of depth at least 2.
pub fn match_markov(sft: &Sft, dist: &std::collections::BTreeMap<Word, f64>) -> Result<MarkovMeasure> {
    let n = sft.alphabet();
    let mut pairs = vec![vec![0.0; n]; n];
    for (w, &p) in dist {
        if w.len() < 2 {
            return Err(Error::Contract("moment matching needs depth >= 2".into()));
        }
        pairs[w.0[0]][w.0[1]] += p;
    }
    let mut kernel = vec![vec![0.0; n]; n];
    let mut pi = vec![0.0; n];
    for i in 0..n {
        let mass: f64 = pairs[i].iter().sum();
        pi[i] = mass;
        if mass > 0.0 {
            for j in 0..n {
                kernel[i][j] = pairs[i][j] / mass;
            }
        } else {
            let succ: Vec<usize> = sft.successors(i).collect();
            for &j in &succ {
                kernel[i][j] = 1.0 / succ.len() as f64;
            }
            if succ.is_empty() {
                kernel[i][i] = 1.0;
            }
        }
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    MarkovMeasure::new(kernel.clone(), pi).or_else(|_| MarkovMeasure::from_kernel(kernel))
}

/// `(1/n) sum_{i<n} psi(shift^i x)` for the periodic point `x = w^infinity`.
pub fn periodic_point_pressure(sft: &Sft, word: &Word, psi: &LocallyConstantPotential) -> Result<f64> {
    if word.is_empty() || !sft.admits_cyclically(&word.0)? {
        return Err(Error::Domain(format!("{word} is not a cycle of the shift")));
    }
    let n = word.len();
    let reps = (psi.range() - 1).div_ceil(n) + 1;
    let long = word.repeat(reps);
    Ok(psi.birkhoff_sum(&long.0, n)? / n as f64)
}

/// `P^#_Z`: only points whose empirical measures converge contribute.
pub fn pressure_hash(
    sft: &Sft,
    points: &[PointSpec],
    psi: &LocallyConstantPotential,
    config: &DiagnosticsConfig,
) -> Result<StarResult> {
    let measures = empirical_limit_measures(sft, points, config, true)?;
    Ok(best_of(&measures, psi)?.unwrap_or_else(|| StarResult::sentinel(psi)))
}

/// Maximizer of the family together with whether it charges `Z`.
pub fn star_equilibrium(sft: &Sft, family: &MeasureFamily, psi: &LocallyConstantPotential) -> Result<StarResult> {
    let mut r = match family {
        MeasureFamily::Single(_) | MeasureFamily::FiniteSet(_) | MeasureFamily::LevelSet(_) => {
            star_pressure(sft, family, psi)?
        }
        _ => return Err(Error::Unsupported("family has no effective maximizer".into())),
    };
    if r.has_flag(StarFlag::SupremumPossiblyNotAttained) || r.maximizer.is_none() {
        return Err(Error::NonConvergence {
            iterations: 0,
            best_value: r.value,
            gradient_norm: f64::NAN,
        });
    }
    if let MeasureFamily::LevelSet(level) = family {
        // An ergodic maximizer is carried by its generic points, whose
        // Birkhoff averages equal its integral.
        let mu = r.maximizer.as_ref().unwrap();
        let on_level = if r.has_flag(StarFlag::Recoded) {
            true
        } else {
            (expectation(mu, &level.phi)? - level.alpha).abs() <= 1e-6
        };
        r.charges_z = Some(on_level && mu.is_ergodic());
    }
    Ok(r)
}

/// Two ergodic measures a specification synthesizer can alternate between.
#[derive(Clone, Debug)]
pub struct WitnessRecipe {
    pub mu1: MarkovMeasure,
    pub mu2: MarkovMeasure,
}

#[derive(Clone, Debug)]
pub struct IrregularResult {
    pub star: StarResult,
    pub witness: Option<WitnessRecipe>,
}

/// `P*` of the set of points whose empirical measures do not converge,
/// which equals the classical pressure on a mixing shift.
pub fn irregular_set_pressure(sft: &Sft, psi: &LocallyConstantPotential) -> Result<IrregularResult> {
    if !is_mixing(sft)? {
        return Err(Error::Unsupported("irregular-set pressure needs a mixing shift".into()));
    }
    let p = classical_pressure(sft, psi)?;
    let eq = p.equilibrium.clone().expect("irreducible shift");
    let witness = if p.recoding.is_none() {
        shortest_cycle_measure(sft)?
            .filter(|mu2| mu2 != &eq)
            .map(|mu2| WitnessRecipe { mu1: eq.clone(), mu2 })
    } else {
        None
    };
    let mut star = StarResult::of(p.value, eq);
    if p.recoding.is_some() {
        star.flags.push(StarFlag::Recoded);
    }
    Ok(IrregularResult { star, witness })
}

/// Orbit measure of the lexicographically first shortest cycle.
fn shortest_cycle_measure(sft: &Sft) -> Result<Option<MarkovMeasure>> {
    for len in 1..=sft.alphabet() {
        for w in sft.words(len) {
            let distinct = {
                let mut s = w.0.clone();
                s.sort_unstable();
                s.dedup();
                s.len() == len
            };
            if distinct && sft.admits_cyclically(&w.0)? {
                return MarkovMeasure::periodic_orbit(sft, &w.0).map(Some);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(p: f64) -> f64 {
        -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
    }

    #[test]
    fn family_examples() {
        let full = Sft::full(2);
        let zero = LocallyConstantPotential::zero(&full);
        let r = star_pressure(&full, &MeasureFamily::AllInvariant, &zero).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
        let b = MarkovMeasure::bernoulli(&[0.75, 0.25]).unwrap();
        let r = star_pressure(&full, &MeasureFamily::Single(b), &zero).unwrap();
        assert!((r.value - h(0.25)).abs() < 1e-12);
        let fam = MeasureFamily::FiniteSet(vec![
            MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap(),
            MarkovMeasure::fixed_point(&full, 0).unwrap(),
        ]);
        assert!((star_pressure(&full, &fam, &zero).unwrap().value - 2f64.ln()).abs() < 1e-12);
        let psi = LocallyConstantPotential::symbol_values(&full, &[-0.3, 2.0]).unwrap();
        let r = star_pressure(&full, &MeasureFamily::Empty, &psi).unwrap();
        assert_eq!(r.value, -0.3);
        assert!(r.has_flag(StarFlag::EmptyFamily));
    }

    #[test]
    fn periodic_examples() {
        let full = Sft::full(2);
        let (a, b) = (0.4, -1.3);
        let psi = LocallyConstantPotential::symbol_values(&full, &[a, b]).unwrap();
        assert_eq!(periodic_point_pressure(&full, &"0".parse().unwrap(), &psi).unwrap(), a);
        let v = periodic_point_pressure(&full, &"01".parse().unwrap(), &psi).unwrap();
        assert!((v - (a + b) / 2.0).abs() < 1e-15);
        let psi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
        let v = periodic_point_pressure(&full, &"001".parse().unwrap(), &psi).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let golden = Sft::golden_mean();
        assert!(periodic_point_pressure(&golden, &"1".parse().unwrap(), &LocallyConstantPotential::zero(&golden)).is_err());
    }

    #[test]
    fn irregular_examples() {
        let full = Sft::full(2);
        let r = irregular_set_pressure(&full, &LocallyConstantPotential::zero(&full)).unwrap();
        assert!((r.star.value - 2f64.ln()).abs() < 1e-12);
        let w = r.witness.unwrap();
        assert_eq!(w.mu2, MarkovMeasure::fixed_point(&full, 0).unwrap());
        let golden = Sft::golden_mean();
        let r = irregular_set_pressure(&golden, &LocallyConstantPotential::zero(&golden)).unwrap();
        assert!((r.star.value - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
        let psi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
        let r = irregular_set_pressure(&full, &psi).unwrap();
        assert!((r.star.value - (1.0 + 1f64.exp()).ln()).abs() < 1e-12);
        let flip = Sft::from_matrix(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            irregular_set_pressure(&flip, &LocallyConstantPotential::zero(&flip)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn matching_recovers_markov() {
        let golden = Sft::golden_mean();
        let mu = MarkovMeasure::from_kernel(vec![vec![0.3, 0.7], vec![1.0, 0.0]]).unwrap();
        let m = match_markov(&golden, &mu.cylinder_probabilities(3)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.kernel()[i][j] - mu.kernel()[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hash_of_fixed_point() {
        let full = Sft::full(2);
        let (a, b) = (0.25, 0.9);
        let psi = LocallyConstantPotential::symbol_values(&full, &[a, b]).unwrap();
        let cfg = DiagnosticsConfig::doubling(4096);
        let r = pressure_hash(&full, &[PointSpec::periodic("0").unwrap()], &psi, &cfg).unwrap();
        assert!((r.value - a).abs() < 1e-12);
    }
}
