//! Pseudo-orbits over a finite index window with optional periodic ends.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, DynError, Result};
use crate::metric::Tolerance;
use crate::system::Dynamics;

/// `(x_i)` for `i` in `[start, start + window.len())`. Before the window the
/// sequence repeats `left_period` (its last entry sits at `start - 1`); after
/// it, `right_period` (its first entry sits right after the window).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoOrbit<P> {
    pub start: i64,
    pub window: Vec<P>,
    #[serde(default)]
    pub left_period: Option<Vec<P>>,
    #[serde(default)]
    pub right_period: Option<Vec<P>>,
}

impl<P: Clone> PseudoOrbit<P> {
    pub fn finite(start: i64, window: Vec<P>) -> Self {
        PseudoOrbit { start, window, left_period: None, right_period: None }
    }

    /// The bi-infinite periodic sequence with period word `cycle`, `x_0 = cycle[0]`.
    pub fn periodic(cycle: Vec<P>) -> Self {
        PseudoOrbit {
            start: 0,
            window: cycle.clone(),
            left_period: Some(cycle.clone()),
            right_period: Some(cycle),
        }
    }

    pub fn end(&self) -> i64 {
        self.start + self.window.len() as i64
    }

    pub fn get(&self, i: i64) -> Option<&P> {
        if i < self.start {
            let lp = self.left_period.as_ref()?;
            let back = (self.start - 1 - i) as usize % lp.len();
            Some(&lp[lp.len() - 1 - back])
        } else if i < self.end() {
            Some(&self.window[(i - self.start) as usize])
        } else {
            let rp = self.right_period.as_ref()?;
            Some(&rp[(i - self.end()) as usize % rp.len()])
        }
    }

    /// Index range covering the window plus one full period (and one wrap
    /// step) of each periodic extension.
    pub fn unrolled_range(&self) -> (i64, i64) {
        let lo = self.start - self.left_period.as_ref().map_or(0, |p| p.len() as i64 + 1);
        let hi = self.end() + self.right_period.as_ref().map_or(0, |p| p.len() as i64 + 1);
        (lo, hi)
    }

    pub fn unrolled(&self) -> Vec<(i64, P)> {
        let (lo, hi) = self.unrolled_range();
        (lo..hi).map(|i| (i, self.get(i).expect("in range").clone())).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.window.is_empty() {
            return Err(DynError::EmptySequence);
        }
        if self.left_period.as_ref().is_some_and(|p| p.is_empty())
            || self.right_period.as_ref().is_some_and(|p| p.is_empty())
        {
            return Err(invalid("periodic extension must be nonempty"));
        }
        Ok(())
    }
}

/// Largest step error `sup d(f(x_i), x_{i+1})` over the unrolled sequence.
pub fn max_step_error<D: Dynamics>(sys: &D, po: &PseudoOrbit<D::Point>) -> Result<f64> {
    po.validate()?;
    let u = po.unrolled();
    Ok(u
        .windows(2)
        .map(|w| sys.distance(&sys.image(&w[0].1), &w[1].1))
        .fold(0.0, f64::max))
}

pub fn is_pseudo_orbit<D: Dynamics>(sys: &D, po: &PseudoOrbit<D::Point>, delta: f64, tol: Tolerance) -> Result<bool> {
    Ok(tol.le(max_step_error(sys, po)?, delta))
}

/// `sup_i d(x_i, f^i(x))` over the unrolled sequence, or `None` when negative
/// indices occur and the map is not invertible.
pub fn shadowing_error<D: Dynamics>(sys: &D, po: &PseudoOrbit<D::Point>, x: &D::Point) -> Result<Option<f64>> {
    po.validate()?;
    let (lo, _) = po.unrolled_range();
    let Some(mut y) = sys.iterate_signed(x, lo) else {
        return Ok(None);
    };
    let mut worst: f64 = 0.0;
    for (_, xi) in po.unrolled() {
        worst = worst.max(sys.distance(&xi, &y));
        y = sys.image(&y);
    }
    Ok(Some(worst))
}

pub fn is_shadowed_by<D: Dynamics>(
    sys: &D,
    po: &PseudoOrbit<D::Point>,
    x: &D::Point,
    eps: f64,
    tol: Tolerance,
) -> Result<bool> {
    Ok(shadowing_error(sys, po, x)?.is_some_and(|e| tol.le(e, eps)))
}

/// The finite chain `x_0, ..., x_k` is a `delta`-chain.
pub fn is_chain<D: Dynamics>(sys: &D, chain: &[D::Point], delta: f64, tol: Tolerance) -> Result<bool> {
    if chain.is_empty() {
        return Err(DynError::EmptySequence);
    }
    Ok(chain
        .windows(2)
        .all(|w| tol.le(sys.distance(&sys.image(&w[0]), &w[1]), delta)))
}
