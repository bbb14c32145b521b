use crate::measures::LocallyConstantPotential;
use crate::symbolic::{PointSpec, Sft};
use crate::{Error, Result};

/// Smallest and largest of `(1/n) S_n phi(x)` over the horizons: finite
/// stand-ins for the lower and upper limits that give the pressure of the
/// singleton `{x}`.
pub fn point_pressure_oracle(
    sft: &Sft,
    x: &PointSpec,
    phi: &LocallyConstantPotential,
    horizons: &[usize],
) -> Result<(f64, f64)> {
    let Some(&last) = horizons.iter().max() else {
        return Err(Error::Contract("at least one horizon is needed".into()));
    };
    if horizons.contains(&0) {
        return Err(Error::Range("horizons must be positive".into()));
    }
    let prefix = x.admissible_prefix(sft, last + phi.range() - 1)?;
    let sums = phi.running_sums(&prefix, last)?;
    let averages = horizons.iter().map(|&n| sums[n - 1] / n as f64);
    Ok(averages.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v))))
}
