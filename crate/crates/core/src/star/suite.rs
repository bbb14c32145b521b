use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{
    achievable_interval, bowen_root_classical, expectation, level_set_pressure_dual, level_set_pressure_primal,
    periodic_point_pressure, star_pressure, MeasureFamily, PrimalParams,
};
use crate::classic::classical_pressure;
use crate::dynamics::generic_word;
use crate::measures::{cylinder_distance, empirical_from_prefix, entropy, LocallyConstantPotential, MarkovMeasure};
use crate::pesin::{point_pressure_oracle, pp_critical, PpConfig};
use crate::spectrum::{SpectrumCurve, SpectrumSample};
use crate::symbolic::{count_words, log_count, recode_higher_block, PointSpec, Sft, Word};
use crate::Result;

const RANDOM_POTENTIALS: usize = 10;
const LEVEL_POTENTIALS: usize = 5;
const LEVEL_GRID: usize = 11;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    /// Index of the system in the suite input.
    pub system: usize,
    pub passed: bool,
    /// Worst observed defect against the tolerance.
    pub detail: String,
    /// The failing instance, when there is one.
    pub instance: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Tracks the worst defect of one named check; `defect <= 0` passes.
struct Check {
    name: &'static str,
    tol: f64,
    worst: f64,
    instance: Option<serde_json::Value>,
}

impl Check {
    fn new(name: &'static str, tol: f64) -> Self {
        Check {
            name,
            tol,
            worst: f64::NEG_INFINITY,
            instance: None,
        }
    }

    /// Record an excess `lhs - rhs` that must stay below the tolerance.
    fn excess(&mut self, value: f64, instance: impl FnOnce() -> serde_json::Value) {
        let v = if value.is_nan() { f64::INFINITY } else { value };
        if v > self.worst {
            self.worst = v;
            if v > self.tol {
                self.instance = Some(instance());
            }
        }
    }

    fn holds(&mut self, ok: bool, instance: impl FnOnce() -> serde_json::Value) {
        self.excess(if ok { 0.0 } else { f64::INFINITY }, instance);
    }

    fn finish(self, system: usize) -> CheckOutcome {
        let passed = self.worst <= self.tol;
        CheckOutcome {
            name: self.name.to_string(),
            system,
            passed,
            detail: format!("worst defect {:.3e} (tolerance {:.0e})", self.worst.max(0.0), self.tol),
            instance: self.instance,
        }
    }
}

fn random_pairs(sft: &Sft, rng: &mut ChaCha8Rng) -> Result<LocallyConstantPotential> {
    let n = sft.alphabet();
    let values: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    LocallyConstantPotential::pair_values(sft, &values)
}

fn random_markov(sft: &Sft, rng: &mut ChaCha8Rng) -> Result<MarkovMeasure> {
    let n = sft.alphabet();
    let kernel: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..n)
                .map(|j| if sft.allows(i, j) { rng.random_range(0.05..1.0) } else { 0.0 })
                .collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    MarkovMeasure::from_kernel(kernel)
}

fn pot_json(sft: &Sft, phi: &LocallyConstantPotential) -> serde_json::Value {
    serde_json::to_value(phi.to_json(sft)).unwrap_or(serde_json::Value::Null)
}

fn measure_json(mu: &MarkovMeasure) -> serde_json::Value {
    serde_json::to_value(mu).unwrap_or(serde_json::Value::Null)
}

/// Shortest cycle of the shift, as a word.
fn shortest_cycle(sft: &Sft) -> Result<Option<Word>> {
    for len in 1..=sft.alphabet() {
        for w in sft.words(len) {
            if sft.admits_cyclically(&w.0)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Runs every classical and family-level invariant on each system, with
/// random potentials and measures drawn from `seed`. Systems must be
/// irreducible.
pub fn property_suite(systems: &[Sft], seed: u64) -> Result<PropertyReport> {
    let mut report = PropertyReport {
        seed,
        checks: Vec::new(),
    };
    for (index, sft) in systems.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(index as u64));
        let phis: Vec<LocallyConstantPotential> = (0..RANDOM_POTENTIALS)
            .map(|_| random_pairs(sft, &mut rng))
            .collect::<Result<_>>()?;
        let measures: Vec<MarkovMeasure> = (0..4).map(|_| random_markov(sft, &mut rng)).collect::<Result<_>>()?;
        let mut out = classic_checks(sft, &phis, &mut rng)?;
        out.extend(family_checks(sft, &phis, &measures, &mut rng)?);
        out.extend(level_checks(sft, &phis[..LEVEL_POTENTIALS])?);
        out.extend(point_checks(sft, &phis, seed)?);
        report.checks.extend(out.into_iter().map(|c| c.finish(index)));
    }
    Ok(report)
}

fn classic_checks(sft: &Sft, phis: &[LocallyConstantPotential], rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut variational = Check::new("variational identity", 1e-8);
    let mut cohomology = Check::new("cohomology invariance", 1e-8);
    let mut lipschitz = Check::new("lipschitz in the potential", 1e-12);
    let mut convexity = Check::new("convexity in the potential", 1e-12);
    let mut conjugacy = Check::new("conjugacy invariance", 1e-10);
    let mut compact = Check::new("compact invariant set gives classical pressure", 1e-12);
    let recoding = recode_higher_block(sft, 2)?;
    for (k, phi) in phis.iter().enumerate() {
        let p = classical_pressure(sft, phi)?;
        let eq = p.equilibrium.clone().expect("irreducible system");
        variational.excess((entropy(&eq) + expectation(&eq, phi)? - p.value).abs(), || {
            json!({ "phi": pot_json(sft, phi), "pressure": p.value })
        });

        let h: Vec<f64> = (0..sft.alphabet()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let cob = classical_pressure(sft, &phi.add_coboundary(sft, &h)?)?.value;
        cohomology.excess((cob - p.value).abs(), || json!({ "phi": pot_json(sft, phi), "h": h }));

        let psi = &phis[(k + 1) % phis.len()];
        let q = classical_pressure(sft, psi)?.value;
        let diff = phi.combine(1.0, psi, -1.0, sft)?.sup_norm();
        lipschitz.excess((p.value - q).abs() - diff, || {
            json!({ "phi": pot_json(sft, phi), "psi": pot_json(sft, psi) })
        });
        for t in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let mix = classical_pressure(sft, &phi.combine(1.0 - t, psi, t, sft)?)?.value;
            convexity.excess(mix - ((1.0 - t) * p.value + t * q), || {
                json!({ "phi": pot_json(sft, phi), "psi": pot_json(sft, psi), "t": t })
            });
        }

        let pulled = classical_pressure(&recoding.sft, &phi.pullback(&recoding)?)?.value;
        conjugacy.excess((pulled - p.value).abs(), || json!({ "phi": pot_json(sft, phi) }));

        let star = star_pressure(sft, &MeasureFamily::AllInvariant, phi)?.value;
        compact.excess((star - p.value).abs(), || json!({ "phi": pot_json(sft, phi) }));
    }
    // entropy against the growth ratio of word counts, which removes the
    // constant prefactor in the count asymptotics
    let mut counting = Check::new("word count growth matches entropy", 1e-6);
    let zero = LocallyConstantPotential::zero(sft);
    let h = classical_pressure(sft, &zero)?.value;
    let growth = log_count(&count_words(sft, 65)) - log_count(&count_words(sft, 64));
    counting.excess((growth - h).abs(), || json!({ "entropy": h, "growth": growth }));
    Ok(vec![variational, cohomology, lipschitz, convexity, conjugacy, compact, counting])
}

fn family_checks(
    sft: &Sft,
    phis: &[LocallyConstantPotential],
    measures: &[MarkovMeasure],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Check>> {
    let small = MeasureFamily::FiniteSet(measures[..2].to_vec());
    let large = MeasureFamily::FiniteSet(measures.to_vec());
    let second = MeasureFamily::FiniteSet(measures[2..].to_vec());
    let mut monotone = Check::new("monotonicity under inclusion", 0.0);
    let mut union = Check::new("union takes the maximum", 1e-12);
    let mut shift = Check::new("integral of phi and phi o shift agree", 1e-12);
    let mut cohomology = Check::new("family cohomology invariance", 1e-12);
    let mut additive = Check::new("sub-additivity bound", 1e-12);
    let mut convexity = Check::new("family convexity", 1e-12);
    let mut lipschitz = Check::new("family lipschitz", 1e-12);
    let mut floor = Check::new("lower bound by inf", 0.0);
    let mut inverse = Check::new("inverse variational principle", 1e-12);
    let mut nonergodic = Check::new("non-ergodic counterexample", 0.0);
    let mut periodic = Check::new("periodic point pressure", 1e-12);

    for (k, phi) in phis.iter().enumerate() {
        let psi = &phis[(k + 1) % phis.len()];
        let p_small = star_pressure(sft, &small, phi)?.value;
        let p_large = star_pressure(sft, &large, phi)?.value;
        let p_second = star_pressure(sft, &second, phi)?.value;
        monotone.excess(p_small - p_large, || json!({ "phi": pot_json(sft, phi) }));
        union.excess((p_large - p_small.max(p_second)).abs(), || json!({ "phi": pot_json(sft, phi) }));

        let shifted = phi.compose_shift(sft)?;
        for mu in measures {
            let d = (expectation(mu, phi)? - expectation(mu, &shifted)?).abs();
            shift.excess(d, || json!({ "phi": pot_json(sft, phi), "mu": measure_json(mu) }));
        }

        let h: Vec<f64> = (0..sft.alphabet()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let cob = star_pressure(sft, &large, &phi.add_coboundary(sft, &h)?)?.value;
        cohomology.excess((cob - p_large).abs(), || json!({ "phi": pot_json(sft, phi), "h": h }));

        let q_large = star_pressure(sft, &large, psi)?.value;
        let beta = measures
            .iter()
            .map(|mu| expectation(mu, psi))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let sum = star_pressure(sft, &large, &phi.combine(1.0, psi, 1.0, sft)?)?.value;
        additive.excess(sum - p_large - beta, || {
            json!({ "phi": pot_json(sft, phi), "psi": pot_json(sft, psi) })
        });
        for t in [0.25, 0.5, 0.75] {
            let mix = star_pressure(sft, &large, &phi.combine(1.0 - t, psi, t, sft)?)?.value;
            convexity.excess(mix - ((1.0 - t) * p_large + t * q_large), || {
                json!({ "phi": pot_json(sft, phi), "psi": pot_json(sft, psi), "t": t })
            });
        }
        let diff = phi.combine(1.0, psi, -1.0, sft)?.sup_norm();
        lipschitz.excess((p_large - q_large).abs() - diff, || {
            json!({ "phi": pot_json(sft, phi), "psi": pot_json(sft, psi) })
        });

        for family in [&MeasureFamily::Empty, &small, &large] {
            let v = star_pressure(sft, family, phi)?.value;
            floor.excess(phi.inf() - v, || json!({ "phi": pot_json(sft, phi) }));
        }

        // The generic points of an ergodic measure form the smallest
        // full-measure set, with pressure h + int phi.
        for mu in measures {
            let single = star_pressure(sft, &MeasureFamily::Single(mu.clone()), phi)?.value;
            let target = entropy(mu) + expectation(mu, phi)?;
            inverse.excess((single - target).abs(), || {
                json!({ "phi": pot_json(sft, phi), "mu": measure_json(mu) })
            });
        }
    }

    // A mixture p mu1 + (1 - p) mu2 with distinct entropies: any full
    // measure set holds generic points of both, so the infimum is the
    // larger entropy, strictly above the entropy of the mixture.
    let zero = LocallyConstantPotential::zero(sft);
    let mu1 = classical_pressure(sft, &zero)?.equilibrium.expect("irreducible system");
    if let Some(cycle) = shortest_cycle(sft)? {
        let len = cycle.len();
        let distinct = {
            let mut s = cycle.0.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == len
        };
        if distinct {
            let mu2 = MarkovMeasure::periodic_orbit(sft, &cycle.0)?;
            let (h1, h2) = (entropy(&mu1), entropy(&mu2));
            let both = star_pressure(sft, &MeasureFamily::FiniteSet(vec![mu1.clone(), mu2.clone()]), &zero)?.value;
            for p in [0.25, 0.5, 0.75] {
                let mixture = p * h1 + (1.0 - p) * h2;
                nonergodic.holds((both - h1.max(h2)).abs() <= 1e-12 && both > mixture, || {
                    json!({ "h1": h1, "h2": h2, "p": p, "family": both })
                });
            }
        }
        for phi in phis {
            let direct = periodic_point_pressure(sft, &cycle, phi)?;
            let n = cycle.len();
            let long = cycle.repeat(2);
            let average = phi.birkhoff_sum(&long.0, n)? / n as f64;
            periodic.excess((direct - average).abs(), || {
                json!({ "phi": pot_json(sft, phi), "cycle": cycle.to_string() })
            });
        }
    }

    Ok(vec![
        monotone, union, shift, cohomology, additive, convexity, lipschitz, floor, inverse, nonergodic, periodic,
    ])
}

fn level_checks(sft: &Sft, phis: &[LocallyConstantPotential]) -> Result<Vec<Check>> {
    let mut agreement = Check::new("dual and primal level-set values agree", 1e-5);
    let mut on_level = Check::new("level-set maximizer integrates to the level", 1e-6);
    let mut dual_convex = Check::new("dual objective convex in q", 1e-10);
    let mut concave = Check::new("level-set spectrum concave", 1e-8);
    let mut bowen = Check::new("bowen root", 1e-8);
    let zero = LocallyConstantPotential::zero(sft);
    let params = PrimalParams::default();
    for phi in phis {
        let (lo, hi) = achievable_interval(sft, phi)?;
        if hi - lo <= 1e-9 {
            continue;
        }
        let mut curve = SpectrumCurve::default();
        for i in 0..LEVEL_GRID {
            let alpha = lo + (hi - lo) * (i + 1) as f64 / (LEVEL_GRID + 1) as f64;
            let dual = level_set_pressure_dual(sft, phi, &zero, alpha)?;
            let primal = level_set_pressure_primal(sft, phi, &zero, alpha, &params)?;
            agreement.excess((dual.value - primal.value).abs(), || {
                json!({ "phi": pot_json(sft, phi), "alpha": alpha, "dual": dual.value, "primal": primal.value })
            });
            if let Some(mu) = &dual.maximizer {
                let m = expectation(mu, phi)?;
                on_level.excess((m - alpha).abs(), || json!({ "phi": pot_json(sft, phi), "alpha": alpha }));
            }
            curve.samples.push(SpectrumSample {
                alpha,
                value: dual.value,
                q_star: dual.q_star.unwrap_or(f64::NAN),
                maximizer_id: String::new(),
                flagged: false,
            });

            let g = |q: f64| -> Result<f64> {
                Ok(classical_pressure(sft, &phi.scaled(sft, q)?)?.value - q * alpha)
            };
            let qs: Vec<f64> = (0..=8).map(|j| -2.0 + 0.5 * j as f64).collect();
            let gs = qs.iter().map(|&q| g(q)).collect::<Result<Vec<_>>>()?;
            for w in gs.windows(3) {
                dual_convex.excess(w[1] - 0.5 * (w[0] + w[2]), || {
                    json!({ "phi": pot_json(sft, phi), "alpha": alpha })
                });
            }
        }
        concave.excess(curve.concavity_defect(), || json!({ "phi": pot_json(sft, phi) }));

        // shift the potential below zero so the root exists
        let negative = phi.add_constant(sft, -phi.sup() - 0.5)?;
        let root = bowen_root_classical(sft, &negative)?;
        let at = classical_pressure(sft, &negative.scaled(sft, root.t)?)?.value;
        bowen.excess(if root.strictly_decreasing { at.abs() } else { f64::INFINITY }, || {
            json!({ "phi": pot_json(sft, &negative), "root": root.t })
        });
    }
    Ok(vec![agreement, on_level, dual_convex, concave, bowen])
}

fn point_checks(sft: &Sft, phis: &[LocallyConstantPotential], seed: u64) -> Result<Vec<Check>> {
    let mut shifted = Check::new("shifted points have matching empirical measures", 0.0);
    let mut sandwich = Check::new("point pressure below family pressure below classical", 1e-6);
    let zero = LocallyConstantPotential::zero(sft);
    let eq = classical_pressure(sft, &zero)?.equilibrium.expect("irreducible system");
    let n = 4096;
    let word = generic_word(&eq, n + 16, seed)?;
    let x = PointSpec::Stored(word);
    for depth in [1, 2] {
        let base = empirical_from_prefix(sft, &x, n, depth)?;
        for k in 1..=4 {
            let moved = empirical_from_prefix(sft, &x.shifted(k), n, depth)?;
            let d = cylinder_distance(&base, &moved.freq, depth)?;
            shifted.excess(d - 2.0 * k as f64 / n as f64, || json!({ "k": k, "depth": depth, "distance": d }));
        }
    }

    // For a periodic point the three quantities coincide up to the
    // cover estimator's bracket.
    if let Some(cycle) = shortest_cycle(sft)? {
        let point = PointSpec::Periodic(cycle.clone());
        for phi in phis.iter().take(3) {
            let star = periodic_point_pressure(sft, &cycle, phi)?;
            let classical = classical_pressure(sft, phi)?.value;
            let grid = (phi.inf() - 1.0, phi.sup() + 1.0);
            let pp = pp_critical(sft, std::slice::from_ref(&point), phi, grid, &PpConfig::default())?;
            let slack = pp.width();
            sandwich.excess((pp.critical - star - slack).max(star - classical), || {
                json!({ "phi": pot_json(sft, phi), "cycle": cycle.to_string(), "pp": pp.critical, "star": star })
            });
        }
    }
    // For the generic point: lower Birkhoff average <= h + int phi <= P.
    for phi in phis.iter().take(3) {
        let (liminf, _) = point_pressure_oracle(sft, &x, phi, &[n / 2, n])?;
        let star = entropy(&eq) + expectation(&eq, phi)?;
        let classical = classical_pressure(sft, phi)?.value;
        sandwich.excess((liminf - star).max(star - classical), || {
            json!({ "phi": pot_json(sft, phi), "liminf": liminf, "star": star })
        });
    }
    Ok(vec![shifted, sandwich])
}
