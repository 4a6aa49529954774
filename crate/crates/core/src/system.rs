//! Finite metric systems, subsets, and the shared `Dynamics` interface.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, DynError, Result};
use crate::metric::Tolerance;
use crate::symbolic::shift::shift_distance;
use crate::symbolic::{SubshiftSystem, SymbolicPoint};

/// A map on a metric space, enough for pseudo-orbits and shadowing checks.
pub trait Dynamics {
    type Point: Clone + Ord + std::fmt::Debug;

    fn image(&self, x: &Self::Point) -> Self::Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    fn iterate(&self, x: &Self::Point, n: usize) -> Self::Point {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.image(&y);
        }
        y
    }

    /// `f^i(x)` for any integer `i`; `None` when the map cannot be inverted.
    fn iterate_signed(&self, x: &Self::Point, i: i64) -> Option<Self::Point> {
        (i >= 0).then(|| self.iterate(x, i as usize))
    }
}

/// How distances between states are obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Dense row-major `n x n` table.
    Table(Vec<f64>),
    /// States are symbolic points; the shift metric is evaluated on demand.
    Symbolic(Vec<SymbolicPoint>),
    /// States are points of the plane with the Euclidean metric.
    Euclidean(Vec<[f64; 2]>),
}

impl Metric {
    fn len(&self, n_table: usize) -> usize {
        match self {
            Metric::Table(_) => n_table,
            Metric::Symbolic(p) => p.len(),
            Metric::Euclidean(p) => p.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSystem {
    n: usize,
    metric: Metric,
    map: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    labels: Option<Vec<String>>,
    #[serde(skip)]
    inverse: Option<Vec<usize>>,
    #[serde(skip)]
    id: u64,
    #[serde(default)]
    tolerance: Tolerance,
}

/// A set of states of one particular system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subset {
    pub system_id: u64,
    pub members: BTreeSet<usize>,
}

impl Subset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(&x)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }
}

impl FiniteMetricSystem {
    /// A system whose map must be a bijection.
    pub fn new(metric: Metric, map: Vec<usize>, labels: Option<Vec<String>>) -> Result<Self> {
        Self::build(metric, map, labels, Tolerance::default(), true)
    }

    /// A system with an arbitrary (continuous) self-map.
    pub fn with_map(metric: Metric, map: Vec<usize>, labels: Option<Vec<String>>) -> Result<Self> {
        Self::build(metric, map, labels, Tolerance::default(), false)
    }

    pub fn from_table(table: Vec<Vec<f64>>, map: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if table.iter().any(|row| row.len() != n) {
            return Err(DynError::MetricViolation("table is not square".into()));
        }
        Self::new(Metric::Table(table.into_iter().flatten().collect()), map, None)
    }

    pub fn build(
        metric: Metric,
        map: Vec<usize>,
        labels: Option<Vec<String>>,
        tolerance: Tolerance,
        require_bijection: bool,
    ) -> Result<Self> {
        let n = map.len();
        if let Metric::Table(t) = &metric {
            if t.len() != n * n {
                return Err(DynError::MetricViolation(format!(
                    "table has {} entries for {n} states",
                    t.len()
                )));
            }
        }
        if metric.len(n) != n {
            return Err(DynError::MetricViolation("metric and map sizes differ".into()));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(invalid("label count differs from state count"));
            }
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= n) {
            return Err(invalid(format!("map sends a state to {bad}, outside 0..{n}")));
        }
        let mut inverse = vec![usize::MAX; n];
        let mut bijective = true;
        for (x, &y) in map.iter().enumerate() {
            if inverse[y] != usize::MAX {
                bijective = false;
            }
            inverse[y] = x;
        }
        if require_bijection && !bijective {
            return Err(DynError::NotBijective("two states share an image".into()));
        }
        let mut sys = FiniteMetricSystem {
            n,
            metric,
            map,
            labels,
            inverse: bijective.then_some(inverse),
            id: 0,
            tolerance,
        };
        sys.check_metric()?;
        sys.id = sys.content_hash();
        Ok(sys)
    }

    /// Recomputes derived fields after deserialization.
    pub fn validated(self) -> Result<Self> {
        let bij = self.inverse.is_some() || {
            let mut seen = vec![false; self.n];
            self.map.iter().all(|&y| y < self.n && !std::mem::replace(&mut seen[y], true))
        };
        Self::build(self.metric, self.map, self.labels, self.tolerance, bij)
    }

    fn check_metric(&self) -> Result<()> {
        let Metric::Table(t) = &self.metric else {
            // Euclidean and shift metrics satisfy the axioms by construction
            return Ok(());
        };
        let n = self.n;
        let tol = self.tolerance;
        for x in 0..n {
            if !tol.is_zero(t[x * n + x]) {
                return Err(DynError::MetricViolation(format!("d({x},{x}) != 0")));
            }
            for y in 0..n {
                let d = t[x * n + y];
                if !d.is_finite() || d < 0.0 {
                    return Err(DynError::MetricViolation(format!("d({x},{y}) = {d}")));
                }
                if !tol.eq(d, t[y * n + x]) {
                    return Err(DynError::MetricViolation(format!("d({x},{y}) != d({y},{x})")));
                }
                if x != y && tol.is_zero(d) {
                    return Err(DynError::MetricViolation(format!("d({x},{y}) = 0 for distinct states")));
                }
            }
        }
        for z in 0..n {
            for x in 0..n {
                let dxz = t[x * n + z];
                for y in 0..n {
                    if tol.gt(t[x * n + y], dxz + t[z * n + y]) {
                        return Err(DynError::MetricViolation(format!(
                            "triangle inequality fails for ({x},{y}) via {z}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn content_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n.hash(&mut h);
        self.map.hash(&mut h);
        match &self.metric {
            Metric::Table(t) => {
                0u8.hash(&mut h);
                t.iter().for_each(|d| d.to_bits().hash(&mut h));
            }
            Metric::Symbolic(p) => {
                1u8.hash(&mut h);
                p.iter().for_each(|x| x.to_string().hash(&mut h));
            }
            Metric::Euclidean(p) => {
                2u8.hash(&mut h);
                p.iter().for_each(|q| (q[0].to_bits(), q[1].to_bits()).hash(&mut h));
            }
        }
        h.finish()
    }

    /// Truncation of a subshift to its points of least period `<= max_period`.
    pub fn symbolic_truncation(shift: &SubshiftSystem, max_period: usize) -> Result<Self> {
        let points = shift.periodic_points(max_period);
        Self::from_symbolic_points(points)
    }

    /// A finite system on shift-invariant set of symbolic points.
    pub fn from_symbolic_points(mut points: Vec<SymbolicPoint>) -> Result<Self> {
        points.sort();
        points.dedup();
        let map = points
            .iter()
            .map(|x| {
                points
                    .binary_search(&x.shifted(1))
                    .map_err(|_| DynError::NotInvariant)
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = points.iter().map(|p| p.to_string()).collect();
        Self::new(Metric::Symbolic(points), map, Some(labels))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Result<Self> {
        self.tolerance = tol;
        self.check_metric()?;
        Ok(self)
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Option<&[usize]> {
        self.inverse.as_deref()
    }

    pub fn is_bijective(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn symbolic_points(&self) -> Option<&[SymbolicPoint]> {
        match &self.metric {
            Metric::Symbolic(p) => Some(p),
            _ => None,
        }
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        match &self.metric {
            Metric::Table(t) => t[x * self.n + y],
            Metric::Symbolic(p) => shift_distance(&p[x], &p[y]),
            Metric::Euclidean(p) => (p[x][0] - p[y][0]).hypot(p[x][1] - p[y][1]),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn apply_n(&self, x: usize, k: usize) -> usize {
        (0..k).fold(x, |y, _| self.map[y])
    }

    pub fn orbit(&self, x: usize, len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(len);
        let mut y = x;
        for _ in 0..len {
            out.push(y);
            y = self.map[y];
        }
        out
    }

    /// Least `p >= 1` with `f^p(x) = x`, if `x` is periodic.
    pub fn period_of(&self, x: usize) -> Option<usize> {
        let mut y = self.map[x];
        for p in 1..=self.n {
            if y == x {
                return Some(p);
            }
            y = self.map[y];
        }
        None
    }

    /// Length after which the forward orbits of both states repeat jointly:
    /// transient lengths plus the lcm of the eventual periods.
    pub fn joint_horizon(&self, x: usize, y: usize) -> usize {
        let (tx, px) = self.tail_and_period(x);
        let (ty, py) = self.tail_and_period(y);
        tx.max(ty) + crate::symbolic::point::lcm(px, py)
    }

    fn tail_and_period(&self, x: usize) -> (usize, usize) {
        let mut seen = vec![usize::MAX; 0];
        seen.resize(self.n, usize::MAX);
        let mut y = x;
        let mut i = 0;
        while seen[y] == usize::MAX {
            seen[y] = i;
            y = self.map[y];
            i += 1;
        }
        (seen[y], i - seen[y])
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for x in 0..self.n {
            for y in x + 1..self.n {
                d = d.max(self.dist(x, y));
            }
        }
        d
    }

    /// Smallest positive distance between two states of `set`.
    pub fn min_positive_distance(&self, set: &Subset) -> Option<f64> {
        let v: Vec<usize> = set.iter().collect();
        let mut best: Option<f64> = None;
        for (i, &x) in v.iter().enumerate() {
            for &y in &v[i + 1..] {
                let d = self.dist(x, y);
                if d > 0.0 && best.map_or(true, |b| d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    /// Distinct positive distances realized between states, ascending.
    pub fn realized_distances(&self) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::new();
        for x in 0..self.n {
            for y in x + 1..self.n {
                v.push(self.dist(x, y));
            }
        }
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup_by(|a, b| self.tolerance.eq(*a, *b));
        v
    }

    pub fn all(&self) -> Subset {
        self.subset(0..self.n).expect("in range")
    }

    pub fn subset(&self, members: impl IntoIterator<Item = usize>) -> Result<Subset> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&x| x >= self.n) {
            return Err(invalid(format!("state {bad} outside 0..{}", self.n)));
        }
        Ok(Subset { system_id: self.id, members })
    }

    pub fn check_subset(&self, s: &Subset) -> Result<()> {
        if s.system_id != self.id {
            return Err(DynError::UnknownSystem { expected: self.id, found: s.system_id });
        }
        Ok(())
    }

    pub fn image_of(&self, s: &Subset) -> Subset {
        Subset { system_id: self.id, members: s.iter().map(|x| self.map[x]).collect() }
    }

    /// `{x : f(x) in s}`.
    pub fn preimage_of(&self, s: &Subset) -> Subset {
        Subset {
            system_id: self.id,
            members: (0..self.n).filter(|&x| s.contains(self.map[x])).collect(),
        }
    }

    pub fn is_invariant(&self, s: &Subset) -> bool {
        self.image_of(s) == *s
    }

    /// The subsystem on an invariant subset, with the old-to-new index map.
    pub fn restrict(&self, s: &Subset) -> Result<(FiniteMetricSystem, Vec<usize>)> {
        self.check_subset(s)?;
        if !self.is_invariant(s) {
            return Err(DynError::NotInvariant);
        }
        let old: Vec<usize> = s.iter().collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &x) in old.iter().enumerate() {
            new_of[x] = i;
        }
        let map = old.iter().map(|&x| new_of[self.map[x]]).collect();
        let metric = match &self.metric {
            Metric::Table(_) => {
                let mut t = Vec::with_capacity(old.len() * old.len());
                for &x in &old {
                    for &y in &old {
                        t.push(self.dist(x, y));
                    }
                }
                Metric::Table(t)
            }
            Metric::Symbolic(p) => Metric::Symbolic(old.iter().map(|&x| p[x].clone()).collect()),
            Metric::Euclidean(p) => Metric::Euclidean(old.iter().map(|&x| p[x]).collect()),
        };
        let labels = self.labels.as_ref().map(|l| old.iter().map(|&x| l[x].clone()).collect());
        let sys = Self::build(metric, map, labels, self.tolerance, self.is_bijective())?;
        Ok((sys, old))
    }

    /// Translates a subset of a restriction back into this system.
    pub fn lift(&self, from_restriction: &Subset, old: &[usize]) -> Subset {
        Subset { system_id: self.id, members: from_restriction.iter().map(|i| old[i]).collect() }
    }
}

impl Dynamics for FiniteMetricSystem {
    type Point = usize;

    fn image(&self, x: &usize) -> usize {
        self.map[*x]
    }

    fn distance(&self, x: &usize, y: &usize) -> f64 {
        self.dist(*x, *y)
    }

    fn iterate_signed(&self, x: &usize, i: i64) -> Option<usize> {
        if i >= 0 {
            return Some(self.apply_n(*x, i as usize));
        }
        let inv = self.inverse.as_ref()?;
        Some((0..i.unsigned_abs()).fold(*x, |y, _| inv[y]))
    }
}
