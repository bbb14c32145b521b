//! Concrete systems: the North-South circle map, Manneville-Pomeau maps,
//! and points built by specification with prescribed orbit statistics.

mod mp;
mod north_south;
mod synthesis;

pub use mp::{
    mp_acip_estimate, mp_lyapunov_spectrum, mp_pressure_curve, mp_star_equilibrium, AcipEstimate,
    MpEquilibrium, MpMap, PressureCurve,
};
pub use north_south::{ns_nonwandering_pressure, ns_orbit_stats, ns_star_pressure, NorthSouthMap, NsSet};
pub use synthesis::{
    generic_word, irregular_witness, specification_synthesizer, Certificate, IrregularWitness,
    Synthesis, SynthesisSchedule,
};
