//! (n, r)-separated subsets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::clique::maximum_clique;
use crate::error::{DynError, Result};
use crate::metric::dyadic_exponent_at_most;
use crate::system::{FiniteMetricSystem, Metric, Subset};

pub const DEFAULT_EXACT_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    /// Maximum clique of the separation graph; refused above `cap` states.
    Exact { cap: usize },
    /// First-fit in state order: maximal by inclusion, a lower bound.
    Greedy,
}

impl SeparationMode {
    pub fn exact() -> Self {
        SeparationMode::Exact { cap: DEFAULT_EXACT_CAP }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SeparationMode::Exact { .. } => "separated-exact",
            SeparationMode::Greedy => "separated-greedy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedSet {
    pub n: usize,
    pub r: f64,
    pub members: Vec<usize>,
    pub mode: SeparationMode,
}

impl SeparatedSet {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// `max_{0 <= i < n} d(f^i x, f^i y) > r`.
pub fn is_separated(sys: &FiniteMetricSystem, x: usize, y: usize, n: usize, r: f64) -> bool {
    let tol = sys.tolerance();
    let (mut u, mut v) = (x, y);
    for _ in 0..n {
        if tol.gt(sys.dist(u, v), r) {
            return true;
        }
        u = sys.apply(u);
        v = sys.apply(v);
    }
    false
}

pub fn separated_set(
    sys: &FiniteMetricSystem,
    k: &Subset,
    n: usize,
    r: f64,
    mode: SeparationMode,
) -> Result<SeparatedSet> {
    sys.check_subset(k)?;
    if n == 0 {
        return Err(crate::error::invalid("n must be at least 1"));
    }
    if !(r > 0.0) {
        return Err(crate::error::invalid(format!("r must be positive, got {r}")));
    }
    let members: Vec<usize> = k.iter().collect();
    let chosen = match mode {
        SeparationMode::Exact { cap } => {
            if members.len() > cap {
                return Err(DynError::OverCap { size: members.len(), cap });
            }
            let adj: Vec<Vec<usize>> = (0..members.len())
                .map(|i| {
                    (0..members.len())
                        .filter(|&j| j != i && is_separated(sys, members[i], members[j], n, r))
                        .collect()
                })
                .collect();
            maximum_clique(&adj).into_iter().map(|i| members[i]).collect()
        }
        SeparationMode::Greedy => match sys.metric() {
            Metric::Symbolic(points) => {
                // separated iff the symbols differ somewhere on [-(K-1), n+K-2]
                let kk = dyadic_exponent_at_most(r).expect("r > 0") as i64;
                let mut seen = HashSet::new();
                members
                    .iter()
                    .copied()
                    .filter(|&x| {
                        let key = if kk == 0 { Vec::new() } else { points[x].window(-(kk - 1), n as i64 + kk - 2) };
                        seen.insert(key)
                    })
                    .collect()
            }
            _ => {
                let mut chosen: Vec<usize> = Vec::new();
                for &x in &members {
                    if chosen.iter().all(|&y| is_separated(sys, x, y, n, r)) {
                        chosen.push(x);
                    }
                }
                chosen
            }
        },
    };
    Ok(SeparatedSet { n, r, members: chosen, mode })
}
