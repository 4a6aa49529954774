//! Entropy estimates from growth rates of separated sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::separated::{separated_set, SeparationMode};
use super::spectral::{fit_window, least_squares_slope};
use crate::error::{invalid, Result};
use crate::metric::dyadic_ladder;
use crate::system::{FiniteMetricSystem, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactSpectral,
    WordCount,
    SeparatedGreedy,
    SeparatedExact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub r: f64,
    pub n: usize,
    pub s_n: usize,
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub r: f64,
    pub slope: f64,
    pub residual: f64,
    pub window: (usize, usize),
    /// Every `s_n` in the window is 1.
    pub degenerate: bool,
    /// `r` is below every positive distance: `s_n` just counts points.
    pub point_counting: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub method: Method,
    pub rows: Vec<EntropyRow>,
    pub fits: Vec<RateFit>,
    /// Maximum slope over the r-schedule.
    pub estimate: f64,
    pub degenerate: bool,
}

/// Dyadic radii from 1/2 down to the smallest distance realized inside `k`,
/// keeping only radii at which the separation graph changes.
pub fn default_r_schedule(sys: &FiniteMetricSystem, k: &Subset) -> Vec<f64> {
    let v: Vec<usize> = k.iter().collect();
    let mut realized = Vec::new();
    for (i, &x) in v.iter().enumerate() {
        for &y in &v[i + 1..] {
            realized.push(sys.dist(x, y));
        }
    }
    let Some(min) = realized.iter().copied().filter(|&d| d > 0.0).min_by(f64::total_cmp) else {
        return vec![0.5];
    };
    let tol = sys.tolerance();
    let ladder = dyadic_ladder(0.5, min);
    let kept: Vec<f64> = ladder
        .iter()
        .copied()
        .filter(|&r| realized.iter().any(|&d| tol.gt(d, r) && tol.le(d, 2.0 * r)))
        .collect();
    if kept.is_empty() {
        vec![*ladder.last().expect("nonempty")]
    } else {
        kept
    }
}

pub fn entropy_estimate(
    sys: &FiniteMetricSystem,
    k: &Subset,
    r_schedule: &[f64],
    n_max: usize,
    mode: SeparationMode,
) -> Result<EntropyReport> {
    sys.check_subset(k)?;
    if n_max < 4 {
        return Err(invalid(format!("n_max must be at least 4, got {n_max}")));
    }
    if r_schedule.is_empty() {
        return Err(invalid("empty r schedule"));
    }
    let min_d = sys.min_positive_distance(k);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &r in r_schedule {
        let sizes: Vec<usize> = (1..=n_max)
            .into_par_iter()
            .map(|n| separated_set(sys, k, n, r, mode).map(|s| s.size()))
            .collect::<Result<_>>()?;
        for (i, &s) in sizes.iter().enumerate() {
            rows.push(EntropyRow { r, n: i + 1, s_n: s, mode: mode.tag().into() });
        }
        // running max keeps log s_n non-decreasing
        let mut run = 0;
        let monotone: Vec<usize> = sizes
            .iter()
            .map(|&s| {
                run = run.max(s);
                run
            })
            .collect();
        let window = fit_window(n_max);
        let pts: Vec<(f64, f64)> =
            window.clone().map(|n| (n as f64, (monotone[n - 1].max(1) as f64).ln())).collect();
        let degenerate = window.clone().all(|n| monotone[n - 1] <= 1);
        let (slope, residual) = if degenerate { (0.0, 0.0) } else { least_squares_slope(&pts) };
        fits.push(RateFit {
            r,
            slope,
            residual,
            window: (*window.start(), *window.end()),
            degenerate,
            point_counting: min_d.map_or(true, |m| r < m),
        });
    }
    let estimate = fits.iter().map(|f| f.slope).fold(0.0, f64::max);
    let degenerate = fits.iter().all(|f| f.degenerate);
    let method = match mode {
        SeparationMode::Exact { .. } => Method::SeparatedExact,
        SeparationMode::Greedy => Method::SeparatedGreedy,
    };
    Ok(EntropyReport { method, rows, fits, estimate, degenerate })
}
