use std::f64::consts::PI;
use std::str::FromStr;

use crate::{Error, Result};

/// The North-South map of the circle. Points are angles in `[0, 2 pi)`
/// measured from the attracting pole `S`; the repelling pole `N` sits at
/// `pi`. Stereographic projection from `N`, `theta -> tan(theta / 2)`,
/// conjugates the map to `x -> x / 2` on the line.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NorthSouthMap;

impl NorthSouthMap {
    pub const NORTH: f64 = PI;
    pub const SOUTH: f64 = 0.0;

    pub fn apply(&self, theta: f64) -> f64 {
        self.iterate(theta, 1)
    }

    /// `f^n(theta)`, computed through the conjugacy.
    pub fn iterate(&self, theta: f64, n: usize) -> f64 {
        let theta = theta.rem_euclid(2.0 * PI);
        if theta == Self::NORTH {
            // cos(pi / 2) does not round to zero
            return theta;
        }
        let u = 0.5 * theta.rem_euclid(2.0 * PI);
        let scale = 0.5f64.powi(n.min(i32::MAX as usize) as i32);
        (2.0 * (scale * u.sin()).atan2(u.cos())).rem_euclid(2.0 * PI)
    }

    /// Chordal distance to `N`, normalized to `[0, 1]`: `|cos(theta / 2)|`,
    /// written so that it vanishes exactly at `N`.
    pub fn distance_to_north(theta: f64) -> f64 {
        (0.5 * (theta - PI)).sin().abs()
    }
}

/// Birkhoff averages of each test function along `n` iterates of `x0`.
pub fn ns_orbit_stats(x0: f64, n: usize, tests: &[&dyn Fn(f64) -> f64]) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Range("need at least one iterate".into()));
    }
    let map = NorthSouthMap;
    let mut sums = vec![0.0; tests.len()];
    for i in 0..n {
        let theta = map.iterate(x0, i);
        for (s, f) in sums.iter_mut().zip(tests) {
            *s += f(theta);
        }
    }
    Ok(sums.into_iter().map(|s| s / n as f64).collect())
}

/// Sets whose `P*` has a closed form for the North-South map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NsSet {
    /// Everything except the attractor.
    CircleMinusSouth,
    North,
    /// Wandering points only.
    CircleMinusPoles,
}

impl FromStr for NsSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle-minus-s" => Ok(NsSet::CircleMinusSouth),
            "north" => Ok(NsSet::North),
            "circle-minus-ns" => Ok(NsSet::CircleMinusPoles),
            _ => Err(Error::Unsupported(format!(
                "unknown set {s:?}; expected circle-minus-s, north or circle-minus-ns"
            ))),
        }
    }
}

/// Every orbit off `N` has `V(x) = {delta_S}`, and `N` contributes `delta_N`;
/// both measures have zero entropy.
pub fn ns_star_pressure(z: NsSet, phi: &dyn Fn(f64) -> f64) -> f64 {
    let (at_n, at_s) = (phi(NorthSouthMap::NORTH), phi(NorthSouthMap::SOUTH));
    match z {
        NsSet::CircleMinusSouth => at_n.max(at_s),
        NsSet::North => at_n,
        NsSet::CircleMinusPoles => at_s,
    }
}

/// `P*` of the non-wandering part of `S^1 \ {S}`, which is `{N}`.
pub fn ns_nonwandering_pressure(phi: &dyn Fn(f64) -> f64) -> f64 {
    phi(NorthSouthMap::NORTH)
}
