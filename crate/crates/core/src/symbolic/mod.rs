//! Symbolic dynamics primitives: subshifts of finite type, words,
//! cylinders, points given by finite descriptions, higher-block recoding
//! and beta-shift word counts.

mod beta;
mod point;
mod recode;
mod sft;
mod word;

pub use beta::{beta_count, beta_entropy, beta_expansion_of_one, is_beta_admissible, BetaExpansion};
pub use point::{PointSource, PointSpec};
pub use recode::{recode_higher_block, BlockRecoding};
pub use sft::{count_words, is_admissible, is_mixing, log_count, Sft};
pub use word::{Cylinder, Word};
