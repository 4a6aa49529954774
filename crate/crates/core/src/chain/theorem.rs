//! Equivalence of the four "finite chain recurrence" conditions, checked
//! across a refinement family of expansive systems.
//!
//! "Infinite" means growth across the family: the last value exceeds the
//! first and the growth threshold. The literal test `CR = Per` holds on every
//! finite bijection, so condition (3) is classified through its asymptotic
//! echo instead: `τ`, the longest forward run during which two distinct
//! chain-recurrent states stay within the expansive constant. Infinitely
//! many periodic points of an expansive map force such runs to grow; finitely
//! many keep them bounded. The literal comparison is reported alongside.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chain_components, periodic_points};
use crate::chaos::sensitive_points;
use crate::error::{invalid, Result};
use crate::symbolic::{ExpansivityCertificate, SubshiftSystem};
use crate::system::{FiniteMetricSystem, Subset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    /// Truncation parameter indexing the refinement.
    pub param: usize,
    pub system: FiniteMetricSystem,
    pub certificate: Option<ExpansivityCertificate>,
}

impl FamilyMember {
    /// Periodic truncation of a subshift, carrying its expansivity certificate.
    pub fn symbolic(shift: &SubshiftSystem, max_period: usize) -> Result<Self> {
        Ok(FamilyMember {
            param: max_period,
            system: FiniteMetricSystem::symbolic_truncation(shift, max_period)?,
            certificate: Some(shift.expansivity_constant()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Inconsistent => "INCONSISTENT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem11Row {
    pub param: usize,
    pub delta: f64,
    pub states: usize,
    pub cr_size: usize,
    pub components: usize,
    pub max_component: usize,
    pub sensitive: usize,
    pub cr_equals_per: bool,
    pub tau: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub name: String,
    pub side: Side,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem11Report {
    pub a: f64,
    pub growth_threshold: usize,
    pub rows: Vec<Theorem11Row>,
    pub conditions: Vec<ConditionOutcome>,
    pub certified: bool,
    /// Absent when some member lacks an expansivity certificate.
    pub verdict: Option<Verdict>,
}

/// Longest run of consecutive forward iterates during which two distinct
/// states of `set` stay within `e`.
pub fn near_asymptotic_run(sys: &FiniteMetricSystem, set: &Subset, e: f64) -> usize {
    let tol = sys.tolerance();
    let v: Vec<usize> = set.iter().collect();
    v.par_iter()
        .enumerate()
        .map(|(k, &x)| {
            let mut best = 0;
            for &y in &v[k + 1..] {
                let h = sys.joint_horizon(x, y);
                // two laps so runs wrapping around the joint period are seen whole
                let (mut u, mut w) = (x, y);
                let mut run = 0;
                for _ in 0..2 * h {
                    if tol.le(sys.dist(u, w), e) {
                        run += 1;
                        best = best.max(run.min(h));
                    } else {
                        run = 0;
                    }
                    u = sys.apply(u);
                    w = sys.apply(w);
                }
            }
            best
        })
        .max()
        .unwrap_or(0)
}

fn growing(values: &[usize], threshold: usize) -> bool {
    match (values.first(), values.last()) {
        (Some(&f), Some(&l)) => l > f && l > threshold,
        _ => false,
    }
}

pub fn theorem_1_1_verify(
    family: &[FamilyMember],
    a: f64,
    delta_schedule: &[f64],
    growth_threshold: usize,
) -> Result<Theorem11Report> {
    if family.is_empty() {
        return Err(invalid("empty family"));
    }
    if delta_schedule.is_empty() {
        return Err(invalid("empty delta schedule"));
    }
    let certified = family.iter().all(|m| m.certificate.is_some());
    let mut rows = Vec::new();
    for m in family {
        let sys = &m.system;
        let e = m.certificate.as_ref().map_or(a, |c| c.constant);
        let per = periodic_points(sys, sys.len().max(1))?;
        for &delta in delta_schedule {
            let dec = chain_components(sys, delta)?;
            let sen = if dec.cr.is_empty() { 0 } else { sensitive_points(sys, &dec.cr, a)?.sensitive.len() };
            rows.push(Theorem11Row {
                param: m.param,
                delta,
                states: sys.len(),
                cr_size: dec.cr.len(),
                components: dec.components.len(),
                max_component: dec.max_component_size(),
                sensitive: sen,
                cr_equals_per: dec.cr == per,
                tau: near_asymptotic_run(sys, &dec.cr, e),
            });
        }
    }
    let column = |delta: f64, f: &dyn Fn(&Theorem11Row) -> usize| -> Vec<usize> {
        rows.iter().filter(|r| r.delta == delta).map(f).collect()
    };
    let any_delta = |pred: &dyn Fn(f64) -> bool| delta_schedule.iter().any(|&d| pred(d));
    let side = |inf: bool| if inf { Side::Infinite } else { Side::Finite };

    let sen_inf = rows.iter().any(|r| r.sensitive > 0);
    let cr_inf = any_delta(&|d| growing(&column(d, &|r| r.cr_size), growth_threshold));
    let comp_inf = any_delta(&|d| growing(&column(d, &|r| r.max_component), growth_threshold));
    let tau_inf = any_delta(&|d| {
        let t = column(d, &|r| r.tau);
        t.last() > t.first()
    });
    let literal = rows.iter().all(|r| r.cr_equals_per);
    let conditions = vec![
        ConditionOutcome {
            name: "(0) Sen_a(f|CR) empty".into(),
            side: side(sen_inf),
            detail: format!("sensitive counts {:?}", rows.iter().map(|r| r.sensitive).collect::<Vec<_>>()),
        },
        ConditionOutcome {
            name: "(1) CR finite".into(),
            side: side(cr_inf),
            detail: format!("|CR| {:?}", rows.iter().map(|r| r.cr_size).collect::<Vec<_>>()),
        },
        ConditionOutcome {
            name: "(2) every chain component finite".into(),
            side: side(comp_inf),
            detail: format!("max component {:?}", rows.iter().map(|r| r.max_component).collect::<Vec<_>>()),
        },
        ConditionOutcome {
            name: "(3) CR = Per".into(),
            side: side(tau_inf),
            detail: format!(
                "near-asymptotic runs {:?}; literal CR = Per at every refinement: {literal}",
                rows.iter().map(|r| r.tau).collect::<Vec<_>>()
            ),
        },
    ];
    let agree = conditions.iter().all(|c| c.side == conditions[0].side);
    let verdict = certified.then_some(if agree { Verdict::Consistent } else { Verdict::Inconsistent });
    Ok(Theorem11Report { a, growth_threshold, rows, conditions, certified, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_family() {
        let one = SubshiftSystem::from_transitions(1, &[(0, 0)]).unwrap();
        let fam: Vec<_> = (1..4).map(|p| FamilyMember::symbolic(&one, p).unwrap()).collect();
        let rep = theorem_1_1_verify(&fam, 0.5, &[0.5, 0.25], 10).unwrap();
        assert!(rep.conditions.iter().all(|c| c.side == Side::Finite));
        assert_eq!(rep.verdict, Some(Verdict::Consistent));
    }

    #[test]
    fn full_shift_family() {
        let full = SubshiftSystem::full(2);
        let fam: Vec<_> = (3..=6).map(|p| FamilyMember::symbolic(&full, p).unwrap()).collect();
        let rep = theorem_1_1_verify(&fam, 0.5, &[0.5, 0.25], 20).unwrap();
        assert!(rep.conditions.iter().all(|c| c.side == Side::Infinite), "{:#?}", rep.conditions);
        assert_eq!(rep.verdict, Some(Verdict::Consistent));
    }

    #[test]
    fn uncertified_family_gets_no_verdict() {
        let full = SubshiftSystem::full(2);
        let mut m = FamilyMember::symbolic(&full, 3).unwrap();
        m.certificate = None;
        let rep = theorem_1_1_verify(&[m], 0.5, &[0.5], 10).unwrap();
        assert_eq!(rep.verdict, None);
    }
}
