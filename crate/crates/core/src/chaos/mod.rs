//! Sensitivity, equicontinuity, horseshoes and the accumulation-set checks.

pub mod appendix;
pub mod horseshoe;
pub mod sensitivity;

pub use appendix::{appendix_verify, AppendixReport, ExpansiveEcho};
pub use horseshoe::{
    horseshoe_certificate, realized_entropy, symbolic_horseshoe, HorseshoeCertificate, Realization, DEFAULT_WORD_LEN,
};
pub use sensitivity::{equicontinuity_modulus, sensitive_points, Equicontinuity, SensitivityReport, SensitivityWitness};
