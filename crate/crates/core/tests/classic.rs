use approx::assert_abs_diff_eq;
use thermopress::classic::{
    capacity_pressure_estimate, classical_pressure, truncation_pressure, CapacityTarget, CountableSystem,
};
use thermopress::measures::{entropy, integrate, LocallyConstantPotential};
use thermopress::symbolic::{PointSpec, Sft};
use thermopress::Error;

/// Perron root of a 2x2 positive matrix by the quadratic formula.
fn perron_2x2(m: [[f64; 2]; 2]) -> f64 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    0.5 * (tr + (tr * tr - 4.0 * det).sqrt())
}

#[test]
fn closed_forms() {
    let full = Sft::full(2);
    let p = classical_pressure(&full, &LocallyConstantPotential::zero(&full)).unwrap();
    assert_abs_diff_eq!(p.value, 2f64.ln(), epsilon = 1e-12);

    let golden = Sft::golden_mean();
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let p = classical_pressure(&golden, &LocallyConstantPotential::zero(&golden)).unwrap();
    assert_abs_diff_eq!(p.value, g.ln(), epsilon = 1e-10);
    // Parry measure: pi = (g^2, 1) / (1 + g^2)
    let mu = p.equilibrium.unwrap();
    assert_abs_diff_eq!(mu.stationary()[1], 1.0 / (1.0 + g * g), epsilon = 1e-12);

    for (a, b) in [(0.0, 1.0), (-3.0, 2.5), (10.0, -10.0), (40.0, 41.0)] {
        let phi = LocallyConstantPotential::symbol_values(&full, &[a, b]).unwrap();
        let expected = f64::max(a, b) + (1.0 + (-(a - b).abs()).exp()).ln();
        assert_abs_diff_eq!(classical_pressure(&full, &phi).unwrap().value, expected, epsilon = 1e-10);
    }
}

#[test]
fn range_two_matches_quadratic_formula() {
    let full = Sft::full(2);
    let vals = [[0.3, -1.2], [0.7, 2.0]];
    let phi = LocallyConstantPotential::pair_values(&full, &vals.map(|r| r.to_vec())).unwrap();
    let m = vals.map(|r| r.map(f64::exp));
    let p = classical_pressure(&full, &phi).unwrap();
    assert_abs_diff_eq!(p.value, perron_2x2(m).ln(), epsilon = 1e-12);
    let mu = p.equilibrium.unwrap();
    assert_abs_diff_eq!(entropy(&mu) + integrate(&phi, &mu).unwrap(), p.value, epsilon = 1e-10);
}

#[test]
fn periodic_and_reducible_inputs() {
    // period-2 shift: a single 2-cycle, pressure is the cycle average
    let flip = Sft::from_matrix(vec![vec![0, 1], vec![1, 0]]).unwrap();
    let phi = LocallyConstantPotential::symbol_values(&flip, &[1.0, 3.0]).unwrap();
    assert_abs_diff_eq!(classical_pressure(&flip, &phi).unwrap().value, 2.0, epsilon = 1e-12);

    let split = Sft::from_matrix(vec![vec![1, 1], vec![0, 1]]).unwrap();
    let err = classical_pressure(&split, &LocallyConstantPotential::zero(&split)).unwrap_err();
    assert!(matches!(err, Error::Reducible { .. }));
}

#[test]
fn capacity_estimates_bracket_the_pressure() {
    let full = Sft::full(2);
    let phi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
    let p = classical_pressure(&full, &phi).unwrap().value;
    let (lo, hi) = capacity_pressure_estimate(&full, &CapacityTarget::WholeShift, &phi, 20, 1).unwrap();
    assert!(lo <= hi);
    assert_abs_diff_eq!(lo, p, epsilon = 0.1);
    // a single periodic orbit has capacity pressure equal to its average
    let x = PointSpec::periodic("01").unwrap();
    let (lo, hi) = capacity_pressure_estimate(&full, &CapacityTarget::Points(vec![x]), &phi, 40, 1).unwrap();
    assert!(lo <= 0.5 + 0.05 && hi >= 0.5 - 0.05);
}

#[test]
fn countable_truncations() {
    let steps = truncation_pressure(&CountableSystem::full(), &[2, 4, 8]).unwrap();
    let values: Vec<f64> = steps.iter().map(|s| s.value.unwrap()).collect();
    assert_eq!(values, vec![2f64.ln(), 4f64.ln(), 8f64.ln()]);
    // the renewal shift has entropy log 2; truncations increase towards it
    let steps = truncation_pressure(&CountableSystem::renewal(), &[2, 4, 8, 16, 32]).unwrap();
    let v: Vec<f64> = steps.iter().map(|s| s.value.unwrap()).collect();
    assert!(v.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    assert!(v[4] < 2f64.ln() && v[4] > 2f64.ln() - 0.01);
}
