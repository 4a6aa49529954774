//! Sensitive points and equicontinuity on finite systems.
//!
//! A state has no neighbours closer than its nearest one, so the probe
//! ladder for `x` stops at `δ*(x)`, the dyadic round-up of the distance from
//! `x` to its nearest neighbour. `x` is `a`-sensitive when some `y` with
//! `d(x, y) <= δ*(x)` separates from it, within one joint period, by more
//! than `max(a, d(x, y))`: the orbits must actually move apart. The ladder
//! starts at `1/2`; a state with no neighbour that close is isolated at
//! every probe.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, DynError, Result};
use crate::metric::{dyadic_ladder, dyadic_round_up};
use crate::system::{FiniteMetricSystem, Subset};

const PROBE_TOP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityWitness {
    pub x: usize,
    pub y: usize,
    /// Iterate at which the orbits are more than `a` apart.
    pub i: usize,
    /// Probe radius `δ*(x)`.
    pub probe: f64,
    pub initial: f64,
    pub separation: f64,
}

impl SensitivityWitness {
    /// Re-checks the witness from raw metric data.
    pub fn verify(&self, sys: &FiniteMetricSystem, a: f64) -> bool {
        let tol = sys.tolerance();
        let d0 = sys.dist(self.x, self.y);
        let di = sys.dist(sys.apply_n(self.x, self.i), sys.apply_n(self.y, self.i));
        self.x != self.y && tol.le(self.probe, PROBE_TOP) && tol.le(d0, self.probe) && tol.gt(di, a) && tol.gt(di, d0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub a: f64,
    pub within: Subset,
    pub sensitive: Subset,
    pub witnesses: Vec<SensitivityWitness>,
    /// The dyadic probe ladder from 1/2 down to the smallest `δ*(x)`.
    pub schedule: Vec<f64>,
}

/// `Sen_a(f|K)` for an invariant `K`.
pub fn sensitive_points(sys: &FiniteMetricSystem, within: &Subset, a: f64) -> Result<SensitivityReport> {
    sys.check_subset(within)?;
    if !(a > 0.0) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    if !sys.is_invariant(within) {
        return Err(DynError::NotInvariant);
    }
    let tol = sys.tolerance();
    let members: Vec<usize> = within.iter().collect();
    let results: Vec<(Option<SensitivityWitness>, Option<f64>)> = members
        .par_iter()
        .map(|&x| {
            let mut near: Vec<(f64, usize)> = members
                .iter()
                .filter(|&&y| y != x)
                .map(|&y| (sys.dist(x, y), y))
                .collect();
            let Some(nn) = near.iter().map(|p| p.0).min_by(|a, b| a.total_cmp(b)) else {
                return (None, None);
            };
            let probe = dyadic_round_up(nn);
            if !tol.le(probe, PROBE_TOP) {
                return (None, None);
            }
            near.retain(|p| tol.le(p.0, probe));
            near.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
            for (d0, y) in near {
                let horizon = sys.joint_horizon(x, y);
                let (mut u, mut v) = (x, y);
                for i in 0..horizon {
                    let di = sys.dist(u, v);
                    if tol.gt(di, a) && tol.gt(di, d0) {
                        let w = SensitivityWitness { x, y, i, probe, initial: d0, separation: di };
                        return (Some(w), Some(probe));
                    }
                    u = sys.apply(u);
                    v = sys.apply(v);
                }
            }
            (None, Some(probe))
        })
        .collect();
    let floor = results.iter().filter_map(|r| r.1).fold(PROBE_TOP, f64::min);
    let witnesses: Vec<SensitivityWitness> = results.into_iter().filter_map(|r| r.0).collect();
    let sensitive = sys.subset(witnesses.iter().map(|w| w.x))?;
    Ok(SensitivityReport {
        a,
        within: within.clone(),
        sensitive,
        witnesses,
        schedule: dyadic_ladder(PROBE_TOP, floor),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Equicontinuity {
    /// Pairs within `delta` stay within `eps` forever.
    Modulus { delta: f64 },
    /// `d(z, w) <= delta` yet `d(f^i z, f^i w) > eps`.
    Witness { z: usize, w: usize, i: usize, delta: f64, separation: f64 },
}

/// Largest `δ` on the ladder `eps, eps/2, ...` with `d(z,w) <= δ ⇒
/// sup_i d(f^i z, f^i w) <= eps`, or a separating pair when every level that
/// still contains pairs fails.
pub fn equicontinuity_modulus(sys: &FiniteMetricSystem, eps: f64) -> Result<Equicontinuity> {
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    let tol = sys.tolerance();
    let min_d = sys.min_positive_distance(&sys.all());
    let ladder = dyadic_ladder(eps, min_d.unwrap_or(eps));
    let mut last_failure = None;
    for &delta in &ladder {
        let failure = (0..sys.len()).into_par_iter().find_map_first(|z| {
            for w in z + 1..sys.len() {
                if !tol.le(sys.dist(z, w), delta) {
                    continue;
                }
                let (mut u, mut v) = (z, w);
                for i in 0..sys.joint_horizon(z, w) {
                    let d = sys.dist(u, v);
                    if tol.gt(d, eps) {
                        return Some(Equicontinuity::Witness { z, w, i, delta, separation: d });
                    }
                    u = sys.apply(u);
                    v = sys.apply(v);
                }
            }
            None
        });
        match failure {
            None => {
                let vacuous = min_d.map_or(true, |m| tol.gt(m, delta));
                if vacuous {
                    if let Some(f) = last_failure {
                        return Ok(f);
                    }
                }
                return Ok(Equicontinuity::Modulus { delta });
            }
            Some(f) => last_failure = Some(f),
        }
    }
    Ok(last_failure.expect("ladder is nonempty"))
}
