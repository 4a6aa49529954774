//! Constructive shadowing, local stable sets and asymptotic pairs.

use serde::{Deserialize, Serialize};

use super::point::{Symbol, SymbolicPoint};
use super::shift::SubshiftSystem;
use crate::error::{invalid, DynError, Result};
use crate::metric::{dyadic_exponent_at_most, Tolerance};
use crate::pseudo::{max_step_error, shadowing_error, PseudoOrbit};

/// The point equal to `l` on `(-inf, start)`, to `mid` on
/// `[start, start + mid.len())` and to `r` afterwards.
pub fn splice(l: &SymbolicPoint, start: i64, mid: &[Symbol], r: &SymbolicPoint) -> SymbolicPoint {
    let end = start + mid.len() as i64;
    let p = l.left_period().len() as i64;
    let q = r.right_period().len() as i64;
    // keep the tails' phase: move their boundaries by whole periods
    let lo = if l.base() <= start { l.base() } else { l.base() - p * (l.base() - start + p - 1).div_euclid(p) };
    let hi = if r.end() >= end { r.end() } else { r.end() + q * (end - r.end() + q - 1).div_euclid(q) };
    let mut center = Vec::with_capacity((hi - lo) as usize);
    if lo < start {
        center.extend(l.window(lo, start - 1));
    }
    center.extend_from_slice(mid);
    if end < hi {
        center.extend(r.window(end, hi - 1));
    }
    SymbolicPoint::new(l.left_period().to_vec(), center, r.right_period().to_vec(), lo)
        .expect("periods are nonempty")
}

/// The diagonal point `y_i = (x_i)_0` of a `delta`-pseudo-orbit, which
/// `delta`-shadows it. Returns `(y, delta)`.
pub fn constructive_shadow(
    shift: &SubshiftSystem,
    po: &PseudoOrbit<SymbolicPoint>,
    delta: f64,
) -> Result<(SymbolicPoint, f64)> {
    if delta > 0.25 {
        return Err(DynError::DeltaTooLarge(delta));
    }
    let tol = Tolerance::default();
    for x in po
        .window
        .iter()
        .chain(po.left_period.iter().flatten())
        .chain(po.right_period.iter().flatten())
    {
        shift.check_point(x)?;
    }
    if !tol.le(max_step_error(shift, po)?, delta) {
        return Err(DynError::NotPseudoOrbit { delta });
    }
    let at0 = |v: &[SymbolicPoint]| v.iter().map(|x| x.symbol_at(0)).collect::<Vec<_>>();
    let start = po.start;
    let end = po.end();
    let left = match &po.left_period {
        Some(lp) => {
            let w = at0(lp);
            SymbolicPoint::new(w.clone(), Vec::new(), w, start)?
        }
        None => po.window[0].shifted(-start),
    };
    let right = match &po.right_period {
        Some(rp) => {
            let w = at0(rp);
            SymbolicPoint::new(w.clone(), Vec::new(), w, end)?
        }
        None => po.window.last().expect("nonempty").shifted(-(end - 1)),
    };
    let y = splice(&left, start, &at0(&po.window), &right);
    shift.check_point(&y)?;
    match shadowing_error(shift, po, &y)? {
        Some(e) if tol.le(e, delta) => Ok((y, delta)),
        e => Err(DynError::ShadowingFailed {
            eps: delta,
            detail: format!("diagonal point {y} has error {e:?}"),
        }),
    }
}

/// `{y : y_i = x_i for lo <= i <= hi}`: the local stable set cut off at a
/// finite horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub lo: i64,
    pub hi: i64,
    pub word: Vec<Symbol>,
}

impl Cylinder {
    pub fn contains(&self, y: &SymbolicPoint) -> bool {
        y.window(self.lo, self.hi) == self.word
    }
}

/// `W^s_r(x)` checked on `[-(K-1), horizon]` where `2^-K` is the largest
/// dyadic value not above `r`.
pub fn local_stable_set(x: &SymbolicPoint, r: f64, horizon: usize) -> Result<Cylinder> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("radius must lie in (0,1), got {r}")));
    }
    let k = dyadic_exponent_at_most(r).expect("r > 0") as i64;
    let lo = -(k - 1);
    let hi = (horizon as i64).max(lo);
    Ok(Cylinder { lo, hi, word: x.window(lo, hi) })
}

/// Some `y != x` in the subshift with `y_i = x_i` for every `i >= i0`, for
/// the largest possible `i0 <= 0`.
pub fn asymptotic_pair(shift: &SubshiftSystem, x: &SymbolicPoint) -> Result<Option<SymbolicPoint>> {
    shift.check_point(x)?;
    let floor = x.base().min(0) - x.left_period().len() as i64 - 1;
    for i in (floor..0).rev() {
        let next = x.symbol_at(i + 1);
        let cur = x.symbol_at(i);
        let Some(b) = shift.predecessors(next).find(|&b| b != cur) else {
            continue;
        };
        // walk predecessors of b until a state repeats
        let mut past = vec![b];
        let mut seen = vec![b];
        let mut s = b;
        let cycle_start = loop {
            s = shift.predecessors(s).next().expect("pruned presentation");
            if let Some(pos) = seen.iter().position(|&t| t == s) {
                break pos;
            }
            seen.push(s);
            past.push(s);
        };
        // `past` lists b, pred(b), ... ; the cycle is past[cycle_start..] read backwards
        let mut cycle: Vec<Symbol> = past[cycle_start..].to_vec();
        cycle.reverse();
        let mut lead: Vec<Symbol> = past[..cycle_start].to_vec();
        lead.reverse();
        let l_start = i + 1 - lead.len() as i64;
        let left = SymbolicPoint::new(cycle.clone(), Vec::new(), cycle, l_start)?;
        let y = splice(&left, l_start, &lead, &x.clone());
        debug_assert!(shift.contains(&y));
        return Ok(Some(y));
    }
    Ok(None)
}
