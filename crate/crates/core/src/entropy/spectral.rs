//! Spectral radius of nonnegative integer matrices, and SFT entropy.

use crate::error::{DynError, Result};
use crate::graph::{is_cyclic_component, strongly_connected_components};
use crate::symbolic::SubshiftSystem;

pub const SPECTRAL_TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 2_000_000;

/// Spectral radius of the adjacency matrix of `adj` (parallel edges count
/// with multiplicity): the maximum over strongly connected components.
pub fn spectral_radius(adj: &[Vec<usize>]) -> f64 {
    strongly_connected_components(adj)
        .iter()
        .filter(|c| is_cyclic_component(adj, c))
        .map(|c| component_radius(adj, c))
        .fold(0.0, f64::max)
}

/// Power iteration on `A + I` restricted to an irreducible component, which
/// is primitive; stops once the Collatz–Wielandt bounds agree to
/// `SPECTRAL_TOLERANCE` relative.
fn component_radius(adj: &[Vec<usize>], comp: &[usize]) -> f64 {
    let n = comp.len();
    let mut local = vec![usize::MAX; adj.len()];
    for (i, &v) in comp.iter().enumerate() {
        local[v] = i;
    }
    let edges: Vec<Vec<usize>> = comp
        .iter()
        .map(|&v| adj[v].iter().filter(|&&w| local[w] != usize::MAX).map(|&w| local[w]).collect())
        .collect();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for _ in 0..MAX_ITERATIONS {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = x[i];
        }
        for (i, out) in edges.iter().enumerate() {
            // (A x)_i = sum over edges i -> j of x_j
            for &j in out {
                y[i] += x[j];
            }
        }
        lo = f64::INFINITY;
        hi = 0.0;
        for i in 0..n {
            let q = y[i] / x[i];
            lo = f64::min(lo, q);
            hi = f64::max(hi, q);
        }
        let norm: f64 = y.iter().sum();
        for i in 0..n {
            x[i] = y[i] / norm;
        }
        if hi - lo <= SPECTRAL_TOLERANCE * (hi - 1.0).max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi) - 1.0
}

/// `log ρ(A)` of the 1-step transition matrix.
pub fn sft_entropy(s: &SubshiftSystem) -> Result<f64> {
    if s.is_empty() {
        return Err(DynError::EmptySubshift);
    }
    Ok(spectral_radius(&s.adjacency()).ln().max(0.0))
}

/// Least-squares slope of `y` against `x`, with the residual sum of squares.
pub fn least_squares_slope(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let rss = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, rss)
}

/// The fit window `[n_max / 2, n_max]`.
pub fn fit_window(n_max: usize) -> std::ops::RangeInclusive<usize> {
    (n_max / 2).max(1)..=n_max
}

/// Slope of `log #L_n` over the fit window.
pub fn word_count_entropy(s: &SubshiftSystem, n_max: usize) -> Result<f64> {
    if s.is_empty() {
        return Err(DynError::EmptySubshift);
    }
    let counts = s.word_counts(n_max);
    let pts: Vec<(f64, f64)> = fit_window(n_max).map(|n| (n as f64, counts[n - 1].ln())).collect();
    Ok(least_squares_slope(&pts).0)
}
