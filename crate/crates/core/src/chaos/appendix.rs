//! Periodic-everywhere systems: where their sensitive points may live.

use serde::{Deserialize, Serialize};

use super::sensitivity::{sensitive_points, SensitivityReport};
use crate::error::{invalid, Result};
use crate::symbolic::ExpansivityCertificate;
use crate::system::{FiniteMetricSystem, Subset};
use crate::topology::accumulation_set;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansiveEcho {
    pub constant: f64,
    /// `Sen_e` at the expansive constant `e`.
    pub sensitive_at_constant: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub a: f64,
    pub r: f64,
    /// Every state is periodic.
    pub all_periodic: bool,
    pub sensitivity: SensitivityReport,
    pub accumulation: Subset,
    pub sensitive_in_accumulation: bool,
    /// Sensitive states with no other state within `r`.
    pub outside: Vec<usize>,
    pub expansive: Option<ExpansiveEcho>,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.all_periodic && self.sensitive_in_accumulation
    }
}

pub fn appendix_verify(
    sys: &FiniteMetricSystem,
    a: f64,
    r: f64,
    certificate: Option<&ExpansivityCertificate>,
) -> Result<AppendixReport> {
    if !(r > 0.0 && r <= a) {
        return Err(invalid(format!("need 0 < r <= a, got r={r}, a={a}")));
    }
    let all = sys.all();
    let all_periodic = (0..sys.len()).all(|x| sys.period_of(x).is_some());
    let sensitivity = sensitive_points(sys, &all, a)?;
    let accumulation = accumulation_set(sys, r)?;
    let outside: Vec<usize> = sensitivity.sensitive.iter().filter(|x| !accumulation.contains(*x)).collect();
    let expansive = match certificate {
        Some(c) => {
            let n = sensitive_points(sys, &all, c.constant)?.sensitive.len();
            let note = if n == 0 {
                "no sensitive points at the expansive constant".to_string()
            } else {
                format!(
                    "{n} states are sensitive at the expansive constant; the model is finite, so this \
                     reflects the infinite limit rather than a contradiction"
                )
            };
            Some(ExpansiveEcho { constant: c.constant, sensitive_at_constant: n, note })
        }
        None => None,
    };
    Ok(AppendixReport {
        a,
        r,
        all_periodic,
        sensitive_in_accumulation: outside.is_empty(),
        sensitivity,
        accumulation,
        outside,
        expansive,
    })
}
