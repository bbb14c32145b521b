//! Variational topological pressure for arbitrary (non-compact, non-invariant)
//! subsets of symbolic and interval dynamical systems.
//!
//! The pressure of a set `Z` is the supremum of `h(mu) + integral of phi`
//! over all measures that arise as weak-* limit points of empirical
//! measures along orbits of points in `Z`. This crate realizes that
//! quantity for set families with an effective description:
//!
//! * [`symbolic`]: subshifts of finite type, words, points, beta-shifts.
//! * [`measures`]: Markov measures, locally constant potentials, empirical
//!   measures and limit-point diagnostics.
//! * [`classic`]: Perron-Frobenius pressure, equilibrium measures,
//!   capacity estimates and countable-state truncations.
//! * [`star`]: the family pressure itself, level-set solvers, Bowen's
//!   equation and the property suite.
//! * [`pesin`]: Caratheodory-type cover pressure and counting lemmas.
//! * [`dynamics`]: North-South and Manneville-Pomeau maps, generic words
//!   and specification-based point synthesis.

pub mod classic;
pub mod dynamics;
mod error;
pub mod io;
pub mod measures;
pub mod par;
pub mod pesin;
pub mod spectrum;
pub mod star;
pub mod symbolic;

pub use error::{Error, Result};
