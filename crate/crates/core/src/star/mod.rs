//! The pressure `P*_Z`: suprema of `h_mu + int psi dmu` over limit points
//! of empirical measures of points in `Z`, for sets `Z` with an effective
//! description.

mod bowen;
mod family;
mod level;
mod suite;

pub use bowen::{bowen_root, bowen_root_classical, BowenRoot};
pub use family::{
    expectation, irregular_set_pressure, match_markov, periodic_point_pressure, pressure_hash,
    star_equilibrium, star_pressure, DiagnosticsConfig, IrregularResult, MeasureFamily, StarFlag,
    StarResult, WitnessRecipe,
};
pub use level::{
    achievable_interval, level_set_spectrum, level_set_pressure_dual, level_set_pressure_primal, LevelSet, PrimalParams,
};
pub use suite::{property_suite, CheckOutcome, PropertyReport};
