//! Invariant measures realized as Markov chains, locally constant
//! potentials, empirical measures along orbit prefixes, and limit-point
//! diagnostics.

pub(crate) mod diagnostics;
pub(crate) mod empirical;
mod markov;
mod potential;

pub use diagnostics::{limit_diagnostics, Cluster, LimitDiagnostics};
pub use empirical::{cylinder_distance, empirical_from_prefix, CylinderDistribution, EmpiricalMeasure};
pub use markov::{entropy, integrate, MarkovMeasure};
pub use potential::LocallyConstantPotential;

/// `x log x` with `0 log 0 = 0`.
pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}
