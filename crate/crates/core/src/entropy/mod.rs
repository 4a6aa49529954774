//! Topological entropy: exact values for subshifts of finite type, and
//! separated-set estimates for finite systems.

pub mod clique;
pub mod estimate;
pub mod separated;
pub mod spectral;

pub use estimate::{default_r_schedule, entropy_estimate, EntropyReport, Method};
pub use separated::{separated_set, SeparatedSet, SeparationMode, DEFAULT_EXACT_CAP};
pub use spectral::{sft_entropy, spectral_radius, word_count_entropy};
