use crate::classic::classical_pressure;
use crate::measures::LocallyConstantPotential;
use crate::symbolic::Sft;
use crate::{Error, Result};

const SCAN_POINTS: usize = 41;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BowenRoot {
    pub t: f64,
    /// Curve value at `t`.
    pub residual: f64,
    /// Bracket from the slope bounds, before bisection.
    pub bracket: (f64, f64),
    /// Whether the curve decreased strictly along a grid covering the bracket.
    pub strictly_decreasing: bool,
    /// The curve is already negative at 0; the root is reported as 0.
    pub negative_side: bool,
}

/// Zero of `t -> curve(t)`, the pressure of `t phi` for `phi < 0`.
///
/// The curve is decreasing with slopes between `-|phi|` and `sup phi`, so
/// the root lies in `[curve(0) / |phi|, curve(0) / (-sup phi)]`.
pub fn bowen_root<F>(curve: F, phi_sup: f64, phi_norm: f64) -> Result<BowenRoot>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(phi_sup < 0.0) {
        return Err(Error::Domain(format!("potential must be strictly negative, sup is {phi_sup}")));
    }
    let c = -phi_sup;
    let at0 = curve(0.0)?;
    if at0 <= 0.0 {
        return Ok(BowenRoot {
            t: 0.0,
            residual: at0,
            bracket: (0.0, 0.0),
            strictly_decreasing: true,
            negative_side: at0 < 0.0,
        });
    }
    let bracket = (at0 / phi_norm, at0 / c);
    let (mut lo, mut hi) = bracket;
    let (mut v_lo, mut v_hi) = (curve(lo)?, curve(hi)?);
    for _ in 0..200 {
        if hi - lo <= f64::EPSILON * hi || v_lo == 0.0 || v_hi == 0.0 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = curve(mid)?;
        if v > 0.0 {
            lo = mid;
            v_lo = v;
        } else {
            hi = mid;
            v_hi = v;
        }
    }
    let (t, residual) = if v_lo.abs() <= v_hi.abs() { (lo, v_lo) } else { (hi, v_hi) };
    let end = 2.0 * bracket.1.max(t) + 1.0;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| end * k as f64 / (SCAN_POINTS - 1) as f64)
        .map(&curve)
        .collect::<Result<_>>()?;
    let strictly_decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    Ok(BowenRoot {
        t,
        residual,
        bracket,
        strictly_decreasing,
        negative_side: false,
    })
}

/// Root of Bowen's equation for the classical pressure of `t phi`.
pub fn bowen_root_classical(sft: &Sft, phi: &LocallyConstantPotential) -> Result<BowenRoot> {
    bowen_root(
        |t| Ok(classical_pressure(sft, &phi.scaled(sft, t)?)?.value),
        phi.sup(),
        phi.sup_norm(),
    )
}
