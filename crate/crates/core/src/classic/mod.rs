//! Classical pressure on subshifts of finite type.

mod capacity;
mod countable;
mod cycles;
mod pressure;
mod transfer;

pub use capacity::{capacity_pressure_estimate, CapacityTarget};
pub use countable::{truncation_pressure, CountableSystem, TruncationStep};
pub use cycles::{critical_shift, max_cycle_mean, min_cycle_mean};
pub use pressure::{
    classical_pressure, component_pressure, joint_range_two, restrict_potential, PressureResult,
};
pub use transfer::{Perron, TransferMatrix};

pub(crate) use pressure::embed;
pub(crate) use transfer::log_sum_exp;
