//! SFT envelopes of totally disconnected invariant sets, and the
//! equivalence check built on them.

pub mod model;
pub mod thm12;

pub use model::{build_sft_model, clopen_partition, ConjugacyCheck, Partition, SftModel};
pub use thm12::{theorem_1_2_verify, ExpansivityWitness, Hypothesis, Thm12Condition, Thm12Input, Thm12Report, Thm12Schedule};
