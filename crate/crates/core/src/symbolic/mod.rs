//! Exact symbolic dynamics on eventually periodic points.

pub mod language;
pub mod maximal;
pub mod point;
pub mod shadow;
pub mod shift;

pub use language::Sublanguage;
pub use point::{Symbol, SymbolicPoint};
pub use shift::{ExpansivityCertificate, SubshiftSystem};
pub use shadow::{asymptotic_pair, constructive_shadow, local_stable_set, splice, Cylinder};
pub use maximal::{is_locally_maximal, is_locally_maximal_at, MaximalityReport};
