//! Neighbourhoods, maximal invariant sets and accumulation points at a
//! stated resolution.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, DynError, Result};
use crate::system::{FiniteMetricSystem, Subset};

/// `{y : d(y, S) <= r}`.
pub fn build_ball(sys: &FiniteMetricSystem, s: &Subset, r: f64) -> Result<Subset> {
    sys.check_subset(s)?;
    if !(r >= 0.0) {
        return Err(invalid(format!("negative radius {r}")));
    }
    if s.is_empty() {
        return Err(DynError::EmptySubset);
    }
    let tol = sys.tolerance();
    let members = (0..sys.len())
        .filter(|&y| s.contains(y) || s.iter().any(|x| tol.le(sys.dist(x, y), r)))
        .collect::<Vec<_>>();
    sys.subset(members)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreResult {
    pub core: Subset,
    /// Least `h` with `K_h = K_{h+1}`, if reached within the horizon.
    pub stabilized_at: Option<usize>,
    pub horizon: usize,
}

impl CoreResult {
    pub fn stabilized(&self) -> bool {
        self.stabilized_at.is_some()
    }
}

/// `K_h = ∩_{|i| <= h} f^i(B_r(S))`, computed by
/// `K_{h+1} = K_h ∩ f(K_h) ∩ f^{-1}(K_h)`. `horizon` defaults to the number
/// of states.
pub fn invariant_core(
    sys: &FiniteMetricSystem,
    s: &Subset,
    r: f64,
    horizon: Option<usize>,
) -> Result<CoreResult> {
    let horizon = horizon.unwrap_or(sys.len());
    let mut k = build_ball(sys, s, r)?;
    for h in 0..=horizon {
        let next = intersect(&intersect(&k, &sys.image_of(&k)), &sys.preimage_of(&k));
        if next == k {
            return Ok(CoreResult { core: k, stabilized_at: Some(h), horizon });
        }
        if h == horizon {
            break;
        }
        k = next;
    }
    Ok(CoreResult { core: k, stabilized_at: None, horizon })
}

fn intersect(a: &Subset, b: &Subset) -> Subset {
    Subset {
        system_id: a.system_id,
        members: a.members.intersection(&b.members).copied().collect(),
    }
}

/// `Y_r = {x : some y != x has d(x, y) <= r}`.
pub fn accumulation_set(sys: &FiniteMetricSystem, r: f64) -> Result<Subset> {
    if !(r > 0.0) {
        return Err(invalid(format!("resolution must be positive, got {r}")));
    }
    let tol = sys.tolerance();
    let members = (0..sys.len())
        .filter(|&x| (0..sys.len()).any(|y| y != x && tol.le(sys.dist(x, y), r)))
        .collect::<Vec<_>>();
    sys.subset(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Metric;

    fn line(n: usize, map: Vec<usize>) -> FiniteMetricSystem {
        let pts = (0..n).map(|i| [i as f64, 0.0]).collect();
        FiniteMetricSystem::new(Metric::Euclidean(pts), map, None).unwrap()
    }

    #[test]
    fn ball_examples() {
        let s = line(5, (0..5).collect());
        let a = s.subset([2]).unwrap();
        assert_eq!(build_ball(&s, &a, 0.0).unwrap(), a);
        assert_eq!(build_ball(&s, &a, 1.0).unwrap(), s.subset([1, 2, 3]).unwrap());
        assert_eq!(build_ball(&s, &a, 10.0).unwrap(), s.all());
        assert!(build_ball(&s, &a, -1.0).is_err());
    }

    #[test]
    fn core_of_isolated_fixed_point() {
        // two fixed points at 0 and 4, transit states swapped in between
        let s = line(5, vec![0, 3, 2, 1, 4]);
        let p = s.subset([0]).unwrap();
        let c = invariant_core(&s, &p, 1.5, None).unwrap();
        assert_eq!(c.core, p);
        assert!(c.stabilized());
        let c0 = invariant_core(&s, &p, 0.0, None).unwrap();
        assert_eq!(c0.stabilized_at, Some(0));
        // the pair {1,3} swaps; a ball reaching 1 but not 3 loses it
        let c = invariant_core(&s, &s.subset([1]).unwrap(), 1.0, None).unwrap();
        assert_eq!(c.core, s.subset([0, 2]).unwrap());
    }

    #[test]
    fn accumulation_resolution() {
        let s = line(5, (0..5).collect());
        assert!(accumulation_set(&s, 0.5).unwrap().is_empty());
        assert_eq!(accumulation_set(&s, 1.0).unwrap(), s.all());
        assert!(accumulation_set(&s, 0.0).is_err());
    }
}
