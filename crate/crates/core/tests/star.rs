use approx::assert_abs_diff_eq;
use thermopress::classic::classical_pressure;
use thermopress::measures::{entropy, LocallyConstantPotential, MarkovMeasure};
use thermopress::star::{
    achievable_interval, bowen_root_classical, expectation, irregular_set_pressure, level_set_pressure_dual,
    level_set_pressure_primal, star_equilibrium, star_pressure, LevelSet, MeasureFamily, PrimalParams, StarFlag,
};
use thermopress::symbolic::Sft;

fn h2(p: f64) -> f64 {
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}

#[test]
fn bernoulli_level_sets() {
    // K_alpha for the frequency of 1s has entropy h(alpha)
    let full = Sft::full(2);
    let phi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
    let zero = LocallyConstantPotential::zero(&full);
    for alpha in [0.1, 0.25, 0.5, 0.8] {
        let d = level_set_pressure_dual(&full, &phi, &zero, alpha).unwrap();
        let p = level_set_pressure_primal(&full, &phi, &zero, alpha, &PrimalParams::default()).unwrap();
        assert_abs_diff_eq!(d.value, h2(alpha), epsilon = 1e-10);
        assert_abs_diff_eq!(p.value, h2(alpha), epsilon = 1e-10);
        // q* = log(alpha / (1 - alpha))
        assert_abs_diff_eq!(d.q_star.unwrap(), (alpha / (1.0 - alpha)).ln(), epsilon = 1e-8);
    }
    let fam = MeasureFamily::LevelSet(LevelSet::new(&full, phi.clone(), 0.25).unwrap());
    let eq = star_equilibrium(&full, &fam, &zero).unwrap();
    assert_eq!(eq.charges_z, Some(true));
    let mu = eq.maximizer.unwrap();
    assert_abs_diff_eq!(mu.stationary()[1], 0.25, epsilon = 1e-9);
}

#[test]
fn boundary_and_empty_levels() {
    let full = Sft::full(2);
    let phi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
    let zero = LocallyConstantPotential::zero(&full);
    let end = level_set_pressure_dual(&full, &phi, &zero, 1.0).unwrap();
    assert_abs_diff_eq!(end.value, 0.0, epsilon = 1e-12);
    assert!(end.has_flag(StarFlag::Boundary));
    let outside = level_set_pressure_dual(&full, &phi, &zero, 1.5).unwrap();
    assert!(outside.has_flag(StarFlag::EmptyFamily));

    // golden mean: the frequency of 1s is at most 1/2, attained by (01)
    let golden = Sft::golden_mean();
    let one = LocallyConstantPotential::symbol_values(&golden, &[0.0, 1.0]).unwrap();
    assert_eq!(achievable_interval(&golden, &one).unwrap(), (0.0, 0.5));
    let top = level_set_pressure_dual(&golden, &one, &LocallyConstantPotential::zero(&golden), 0.5).unwrap();
    assert_abs_diff_eq!(top.value, 0.0, epsilon = 1e-12);
}

#[test]
fn bowen_roots() {
    let full = Sft::full(2);
    let r = bowen_root_classical(&full, &LocallyConstantPotential::constant(&full, -2f64.ln()).unwrap()).unwrap();
    assert_abs_diff_eq!(r.t, 1.0, epsilon = 1e-8);
    assert!(r.strictly_decreasing);
    let golden = Sft::golden_mean();
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let r = bowen_root_classical(&golden, &LocallyConstantPotential::constant(&golden, -2f64.ln()).unwrap()).unwrap();
    assert_abs_diff_eq!(r.t, g.ln() / 2f64.ln(), epsilon = 1e-8);
}

#[test]
fn families() {
    let full = Sft::full(2);
    let psi = LocallyConstantPotential::symbol_values(&full, &[0.5, -0.25]).unwrap();
    let empty = star_pressure(&full, &MeasureFamily::Empty, &psi).unwrap();
    assert_eq!(empty.value, -0.25);
    let p = classical_pressure(&full, &psi).unwrap().value;
    let irr = irregular_set_pressure(&full, &psi).unwrap();
    assert_abs_diff_eq!(irr.star.value, p, epsilon = 1e-12);
    let w = irr.witness.unwrap();
    assert_ne!(expectation(&w.mu1, &psi).unwrap(), expectation(&w.mu2, &psi).unwrap());

    let b = MarkovMeasure::bernoulli(&[0.3, 0.7]).unwrap();
    let single = star_pressure(&full, &MeasureFamily::Single(b.clone()), &psi).unwrap();
    assert_abs_diff_eq!(single.value, entropy(&b) + 0.3 * 0.5 - 0.7 * 0.25, epsilon = 1e-12);
}
