use approx::assert_abs_diff_eq;
use num_traits::ToPrimitive;
use thermopress::measures::LocallyConstantPotential;
use thermopress::pesin::{bowen_count, bowen_count_brute, point_pressure_oracle, pp_critical, tuple_entropy, PpConfig};
use thermopress::symbolic::{PointSpec, Sft};

#[test]
fn counting_lemma() {
    for k in 1..=16usize {
        for h in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
            let c = bowen_count(k, h, 2).unwrap();
            let bound = h + 2.0 * ((k + 1) as f64).ln() / k as f64;
            assert!(c.to_f64().unwrap().ln() / k as f64 <= bound + 1e-12, "k={k} h={h}");
            if k <= 12 {
                assert_eq!(c.to_u64().unwrap(), bowen_count_brute(k, h, 2).unwrap());
            }
        }
    }
    // length 4 tuples with entropy at most 1/2: only the constant ones
    assert_eq!(bowen_count_brute(4, 0.5, 2).unwrap(), 2);
    assert_abs_diff_eq!(tuple_entropy(&[0, 0, 1, 1]).unwrap(), 2f64.ln(), epsilon = 1e-15);
}

#[test]
fn periodic_point_critical_value() {
    let full = Sft::full(2);
    let phi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
    let x = PointSpec::periodic("001").unwrap();
    let est = pp_critical(&full, &[x], &phi, (-1.0, 2.0), &PpConfig::default()).unwrap();
    assert!(est.bracket.0 <= 1.0 / 3.0 + 1e-3 && est.bracket.1 >= 1.0 / 3.0 - 1e-3);
    assert!(est.width() <= 1e-3 + 1e-12);
}

#[test]
fn oracle_on_periodic_points() {
    let full = Sft::full(2);
    let phi = LocallyConstantPotential::symbol_values(&full, &[0.0, 1.0]).unwrap();
    let x = PointSpec::periodic("0111").unwrap();
    let (lo, hi) = point_pressure_oracle(&full, &x, &phi, &[4, 400, 4000]).unwrap();
    assert_eq!((lo, hi), (0.75, 0.75));
}
