//! Chain recurrence, sensitivity, shadowing, entropy and locally maximal
//! sets, computed on finitely presented dynamical systems.

pub mod chain;
pub mod chaos;
pub mod entropy;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metric;
pub mod modelbuild;
pub mod pipeline;
pub mod pseudo;
pub mod symbolic;
pub mod system;
pub mod topology;

pub use error::{DynError, Result};
pub use system::{Dynamics, FiniteMetricSystem, Metric, Subset};
