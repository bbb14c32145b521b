//! Carathéodory-type pressure from cylinder covers, its closed form for a
//! single point, and the entropy-counting lemma behind the lower bounds.

mod counting;
mod cover;
mod oracle;

pub use counting::{bowen_count, bowen_count_brute, tuple_entropy};
pub use cover::{
    log_q_value, m_value, pp_critical, q_value, CaratheodoryEstimate, MClass, MSample, MValue,
    PpConfig, StringCover,
};
pub use oracle::point_pressure_oracle;
