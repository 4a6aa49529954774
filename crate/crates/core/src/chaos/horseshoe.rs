//! Horseshoes from a sensitive chain-recurrent point.
//!
//! Two `δ`-chains `z`, `w` of length `m` leave and return to `p` and are more
//! than `2ε` apart at step `k`. Any concatenation `ξ_s`, `s ∈ {z,w}^ℓ`, is a
//! `δ`-pseudo-orbit; its `ε`-shadows are pairwise `(ℓm, ε)`-separated, so the
//! entropy is at least `log 2 / m`.

use std::collections::VecDeque;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use super::sensitivity::sensitive_points;
use crate::chain::chain_components_within;
use crate::error::{invalid, DynError, Result};
use crate::metric::{dyadic, dyadic_exponent_at_most, dyadic_ladder, Tolerance};
use crate::pseudo::{is_chain, PseudoOrbit};
use crate::symbolic::{constructive_shadow, splice, SubshiftSystem, SymbolicPoint};
use crate::system::{Dynamics, FiniteMetricSystem, Subset};

/// Longest word length materialized by default.
pub const DEFAULT_WORD_LEN: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization<P> {
    /// `true` selects `w`, `false` selects `z`.
    pub word: Vec<bool>,
    pub point: P,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorseshoeCertificate<P> {
    pub p: P,
    pub k: usize,
    pub m: usize,
    pub z: Vec<P>,
    pub w: Vec<P>,
    /// Points within `eta` of `p` whose iterates at `sen_time` are more than
    /// `a_effective` apart.
    pub x: P,
    pub y: P,
    pub sen_time: usize,
    pub eta: f64,
    pub delta: f64,
    pub eps: f64,
    pub a: f64,
    /// Sensitivity level actually used; below `a` only when `Sen_a` is empty
    /// but some level in `(2ε, a)` works.
    pub a_effective: f64,
    pub margin: f64,
    pub entropy_bound: f64,
    pub word_len: usize,
    pub realizations: Vec<Realization<P>>,
}

fn reject(msg: impl Into<String>) -> DynError {
    DynError::CertificateRejected(msg.into())
}

fn words(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << len).map(move |bits| (0..len).map(|j| bits >> (len - 1 - j) & 1 == 1).collect())
}

/// `ξ_s` on `[0, ℓm]`.
fn concatenate<P: Clone>(z: &[P], w: &[P], word: &[bool]) -> Vec<P> {
    let m = z.len() - 1;
    let mut out = Vec::with_capacity(word.len() * m + 1);
    for &b in word {
        out.extend_from_slice(&(if b { w } else { z })[..m]);
    }
    out.push(z[m].clone());
    out
}

/// Some `i < n` with `d(f^i x, f^i y) > r`.
fn separated<D: Dynamics>(sys: &D, x: &D::Point, y: &D::Point, n: usize, r: f64, tol: Tolerance) -> bool {
    let (mut u, mut v) = (x.clone(), y.clone());
    for _ in 0..n {
        if tol.gt(sys.distance(&u, &v), r) {
            return true;
        }
        u = sys.image(&u);
        v = sys.image(&v);
    }
    false
}

/// `(1/n) log s` for the largest greedily built `(n, r)`-separated subfamily
/// of `points`.
pub fn realized_entropy<D: Dynamics>(sys: &D, points: &[D::Point], n: usize, r: f64, tol: Tolerance) -> f64 {
    if n == 0 || points.is_empty() {
        return 0.0;
    }
    let mut kept: Vec<&D::Point> = Vec::new();
    for x in points {
        if kept.iter().all(|y| separated(sys, x, y, n, r, tol)) {
            kept.push(x);
        }
    }
    (kept.len() as f64).ln() / n as f64
}

impl<P: Clone + Ord + Debug> HorseshoeCertificate<P> {
    /// Re-checks every claim from raw metric data.
    pub fn verify<D: Dynamics<Point = P>>(&self, sys: &D, tol: Tolerance) -> Result<()> {
        let d = |x: &P, y: &P| sys.distance(x, y);
        if !(self.eps > 0.0 && tol.gt(self.a_effective, 2.0 * self.eps) && tol.le(self.a_effective, self.a)) {
            return Err(reject("need 0 < eps < a_effective / 2 and a_effective <= a"));
        }
        if !tol.le(self.delta, self.eps) {
            return Err(reject("delta exceeds eps"));
        }
        if self.z.len() != self.m + 1 || self.w.len() != self.m + 1 || self.m < self.k + 1 {
            return Err(reject("chain lengths disagree with m, or m < k + 1"));
        }
        let ends = [&self.z[0], &self.w[0], &self.z[self.m], &self.w[self.m]];
        if ends.iter().any(|e| **e != self.p) {
            return Err(reject("chains do not start and end at p"));
        }
        if !is_chain(sys, &self.z, self.delta, tol)? || !is_chain(sys, &self.w, self.delta, tol)? {
            return Err(reject("z or w is not a delta-chain"));
        }
        let gap = d(&self.z[self.k], &self.w[self.k]);
        if !tol.gt(gap, 2.0 * self.eps) || !tol.eq(gap - 2.0 * self.eps, self.margin) {
            return Err(reject(format!("separation {gap} at k does not beat 2 eps")));
        }
        if !tol.le(d(&self.p, &self.x), self.eta) || !tol.le(d(&self.p, &self.y), self.eta) {
            return Err(reject("sensitivity witnesses are not within eta of p"));
        }
        let sx = sys.iterate(&self.x, self.sen_time);
        let sy = sys.iterate(&self.y, self.sen_time);
        if !tol.gt(d(&sx, &sy), self.a_effective) {
            return Err(reject("sensitivity witnesses do not separate past a_effective"));
        }
        if !tol.eq(self.entropy_bound, std::f64::consts::LN_2 / self.m as f64) {
            return Err(reject("entropy bound is not log 2 / m"));
        }
        let expected: Vec<Vec<bool>> = words(self.word_len).collect();
        let got: Vec<Vec<bool>> = self.realizations.iter().map(|r| r.word.clone()).collect();
        if got != expected {
            return Err(reject("realizations do not cover every word exactly once"));
        }
        let n = self.word_len * self.m;
        for r in &self.realizations {
            let xi = concatenate(&self.z, &self.w, &r.word);
            let mut u = r.point.clone();
            for v in &xi {
                if !tol.le(d(&u, v), self.eps) {
                    return Err(reject(format!("realization of {:?} does not eps-shadow its pseudo-orbit", r.word)));
                }
                u = sys.image(&u);
            }
        }
        for (i, r) in self.realizations.iter().enumerate() {
            for t in &self.realizations[i + 1..] {
                if !separated(sys, &r.point, &t.point, n, self.eps, tol) {
                    return Err(reject(format!("{:?} and {:?} are not (lm, eps)-separated", r.word, t.word)));
                }
            }
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<P> {
        self.realizations.iter().map(|r| r.point.clone()).collect()
    }

    /// Entropy estimate on the realized family at length `ℓm`.
    pub fn realized_entropy<D: Dynamics<Point = P>>(&self, sys: &D, tol: Tolerance) -> f64 {
        realized_entropy(sys, &self.points(), self.word_len * self.m, self.eps, tol)
    }
}

fn check_scales(eps: f64, a: f64) -> Result<()> {
    if !(eps > 0.0 && eps < a / 2.0) {
        return Err(invalid(format!("need 0 < eps < a/2, got eps={eps}, a={a}")));
    }
    Ok(())
}

/// Horseshoe through the periodic point `p` of a subshift.
///
/// The chains follow the orbits of `x = p` and `y`, which differs from `p`
/// on a block starting at `L = D + 1` where `δ = 2^-D`; the first and last
/// steps are the jumps off and back onto the orbit of `p`.
pub fn symbolic_horseshoe(
    shift: &SubshiftSystem,
    p: &SymbolicPoint,
    eps: f64,
    a: f64,
    word_len: usize,
) -> Result<HorseshoeCertificate<SymbolicPoint>> {
    check_scales(eps, a)?;
    shift.check_point(p)?;
    let q = p.period().ok_or_else(|| invalid(format!("{p} is not periodic")))? as i64;
    if word_len == 0 || word_len > 10 {
        return Err(invalid("word length must lie in 1..=10"));
    }
    // coordinates differing at time k put σ^k x and σ^k y at distance 1
    let a_effective = if a < 1.0 { a } else { (1.0 + 2.0 * eps) / 2.0 };
    if !(2.0 * eps < a_effective) {
        return Err(DynError::NoSensitivePoint);
    }
    let dexp = dyadic_exponent_at_most(eps.min(0.25)).expect("eps > 0") as i64;
    let delta = dyadic(dexp as u32);
    let l = dexp + 1;
    let mut best: Option<(i64, i64, SymbolicPoint, SymbolicPoint)> = None;
    for len in 1..=12usize {
        let fits: Vec<SymbolicPoint> = shift
            .words(len)
            .into_iter()
            .map(|u| splice(p, l, &u, p))
            .filter(|x| shift.contains(x))
            .collect();
        for (i, x) in fits.iter().enumerate() {
            for y in &fits[i + 1..] {
                let k = (l..l + len as i64).find(|&j| x.symbol_at(j) != y.symbol_at(j)).expect("distinct");
                let lower = (l + len as i64 + dexp - 1).max(k + 1);
                let m = (lower + q - 1) / q * q;
                if best.as_ref().map_or(true, |b| m < b.0) {
                    best = Some((m, k, x.clone(), y.clone()));
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    let (m, k, x, y) = best.ok_or(DynError::NoSensitivePoint)?;
    let chain = |v: &SymbolicPoint| -> Vec<SymbolicPoint> {
        let mut c = vec![p.clone()];
        c.extend((1..m).map(|i| v.shifted(i)));
        c.push(p.clone());
        c
    };
    let (z, w) = (chain(&x), chain(&y));
    let eta = shift.shift_metric(p, &x)?.max(shift.shift_metric(p, &y)?);
    let orbit: Vec<SymbolicPoint> = (0..q).map(|i| p.shifted(i)).collect();
    let mut realizations = Vec::new();
    for word in words(word_len) {
        let mut xi = concatenate(&z, &w, &word);
        xi.pop();
        let po = PseudoOrbit {
            start: 0,
            window: xi,
            left_period: Some(orbit.clone()),
            right_period: Some(orbit.clone()),
        };
        let (point, error) = constructive_shadow(shift, &po, delta)?;
        realizations.push(Realization { word, point, error });
    }
    let margin = shift.shift_metric(&z[k as usize], &w[k as usize])? - 2.0 * eps;
    let cert = HorseshoeCertificate {
        p: p.clone(),
        k: k as usize,
        m: m as usize,
        z,
        w,
        x,
        y,
        sen_time: k as usize,
        eta,
        delta,
        eps,
        a,
        a_effective,
        margin,
        entropy_bound: std::f64::consts::LN_2 / m as f64,
        word_len,
        realizations,
    };
    cert.verify(shift, Tolerance::default())?;
    Ok(cert)
}

/// Shortest pair of `delta`-chains inside `s` from `(p, p)` back to `(p, p)`
/// that are more than `2 eps` apart somewhere. Returns `(k, z, w)`.
fn chain_pair(
    sys: &FiniteMetricSystem,
    s: &[usize],
    p: usize,
    delta: f64,
    eps: f64,
) -> Option<(usize, Vec<usize>, Vec<usize>)> {
    let tol = sys.tolerance();
    let n = s.len();
    let pos = |x: usize| s.binary_search(&x).ok();
    let succ: Vec<Vec<usize>> = s
        .iter()
        .map(|&u| (0..n).filter(|&j| tol.le(sys.dist(sys.apply(u), s[j]), delta)).collect())
        .collect();
    let far = |i: usize, j: usize| tol.gt(sys.dist(s[i], s[j]), 2.0 * eps);
    let idx = |i: usize, j: usize, f: bool| (i * n + j) * 2 + f as usize;
    let ip = pos(p)?;
    let mut parent = vec![usize::MAX; n * n * 2];
    let start = idx(ip, ip, false);
    parent[start] = start;
    let goal = idx(ip, ip, true);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let (i, j, f) = (cur / 2 / n, cur / 2 % n, cur % 2 == 1);
        for &i2 in &succ[i] {
            for &j2 in &succ[j] {
                let next = idx(i2, j2, f || far(i2, j2));
                if parent[next] == usize::MAX {
                    parent[next] = cur;
                    if next == goal {
                        queue.clear();
                        break;
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    if parent[goal] == usize::MAX {
        return None;
    }
    let mut path = vec![goal];
    let mut cur = goal;
    loop {
        cur = parent[cur];
        path.push(cur);
        if cur == start {
            break;
        }
    }
    path.reverse();
    let z: Vec<usize> = path.iter().map(|&c| s[c / 2 / n]).collect();
    let w: Vec<usize> = path.iter().map(|&c| s[c / 2 % n]).collect();
    let k = path.iter().position(|&c| c % 2 == 1)?;
    Some((k, z, w))
}

/// Horseshoe inside `CR(f|Λ)` of a finite system. The shadowing search is
/// exhaustive over states; `δ` descends the dyadic ladder from `eps` until
/// every word is realized and the realizations separate.
pub fn horseshoe_certificate(
    sys: &FiniteMetricSystem,
    lambda: &Subset,
    eps: f64,
    a: f64,
    word_len: usize,
) -> Result<HorseshoeCertificate<usize>> {
    check_scales(eps, a)?;
    sys.check_subset(lambda)?;
    if word_len == 0 || word_len > 10 {
        return Err(invalid("word length must lie in 1..=10"));
    }
    let tol = sys.tolerance();
    let floor = sys.min_positive_distance(lambda).unwrap_or(eps);
    let mut last_failure = None;
    let mut any_sensitive = false;
    for delta in dyadic_ladder(eps, floor) {
        let cr = chain_components_within(sys, lambda, delta)?.cr;
        if cr.is_empty() {
            continue;
        }
        let mut a_effective = a;
        let mut sen = sensitive_points(sys, &cr, a)?;
        if sen.witnesses.is_empty() {
            a_effective = (a + 2.0 * eps) / 2.0;
            sen = sensitive_points(sys, &cr, a_effective)?;
        }
        if sen.witnesses.is_empty() {
            continue;
        }
        any_sensitive = true;
        let s: Vec<usize> = cr.iter().collect();
        for wit in &sen.witnesses {
            let Some((k, z, w)) = chain_pair(sys, &s, wit.x, delta, eps) else {
                continue;
            };
            let m = z.len() - 1;
            let mut realizations = Vec::new();
            for word in words(word_len) {
                let xi = concatenate(&z, &w, &word);
                let best = (0..sys.len())
                    .map(|v| {
                        let mut u = v;
                        let mut err: f64 = 0.0;
                        for t in &xi {
                            err = err.max(sys.dist(u, *t));
                            u = sys.apply(u);
                        }
                        (err, v)
                    })
                    .min_by(|x, y| x.0.total_cmp(&y.0))
                    .expect("nonempty system");
                if !tol.le(best.0, eps) {
                    last_failure = Some(format!("no state eps-shadows xi_{word:?} (best error {})", best.0));
                    break;
                }
                realizations.push(Realization { word, point: best.1, error: best.0 });
            }
            if realizations.len() < 1 << word_len {
                continue;
            }
            let cert = HorseshoeCertificate {
                p: wit.x,
                k,
                m,
                margin: sys.dist(z[k], w[k]) - 2.0 * eps,
                z,
                w,
                x: wit.x,
                y: wit.y,
                sen_time: wit.i,
                eta: wit.initial,
                delta,
                eps,
                a,
                a_effective,
                entropy_bound: std::f64::consts::LN_2 / m as f64,
                word_len,
                realizations,
            };
            match cert.verify(sys, tol) {
                Ok(()) => return Ok(cert),
                Err(e) => last_failure = Some(e.to_string()),
            }
        }
    }
    if !any_sensitive {
        return Err(DynError::NoSensitivePoint);
    }
    Err(DynError::ShadowingFailed {
        eps,
        detail: last_failure.unwrap_or_else(|| "no pair of chains separates by more than 2 eps".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_fixed_point() {
        let full = SubshiftSystem::full(2);
        let p: SymbolicPoint = "(0)".parse().unwrap();
        let c = symbolic_horseshoe(&full, &p, 0.25, 1.0, 3).unwrap();
        assert_eq!((c.k, c.m), (3, 5));
        assert_eq!(c.realizations.len(), 8);
        assert_eq!(c.a_effective, 0.75);
        let h = c.realized_entropy(&full, Tolerance::default());
        assert!((h - std::f64::consts::LN_2 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_fixed_point() {
        let gm = SubshiftSystem::golden_mean();
        let p: SymbolicPoint = "(0)".parse().unwrap();
        let c = symbolic_horseshoe(&gm, &p, 0.25, 1.0, 2).unwrap();
        assert!(c.m >= 2);
        assert!(c.z.iter().chain(&c.w).all(|x| gm.contains(x)));
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let full = SubshiftSystem::full(2);
        let p: SymbolicPoint = "(0)".parse().unwrap();
        let mut c = symbolic_horseshoe(&full, &p, 0.25, 1.0, 2).unwrap();
        c.realizations[1].point = c.realizations[0].point.clone();
        assert!(matches!(c.verify(&full, Tolerance::default()), Err(DynError::CertificateRejected(_))));
    }

    #[test]
    fn identity_has_no_horseshoe() {
        let sys = FiniteMetricSystem::from_table(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0, 1]).unwrap();
        let all = sys.all();
        assert_eq!(horseshoe_certificate(&sys, &all, 0.1, 0.5, 2), Err(DynError::NoSensitivePoint));
        assert!(horseshoe_certificate(&sys, &all, 0.3, 0.5, 2).is_err());
    }

    #[test]
    fn truncated_full_shift() {
        let full = SubshiftSystem::full(2);
        let sys = FiniteMetricSystem::symbolic_truncation(&full, 5).unwrap();
        let c = horseshoe_certificate(&sys, &sys.all(), 0.25, 0.75, 1).unwrap();
        c.verify(&sys, sys.tolerance()).unwrap();
        assert!(c.entropy_bound > 0.0);
    }
}
