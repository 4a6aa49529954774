//! δ-chain graphs, chain-recurrent sets and chain components.

pub mod theorem;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{component_index, condensation_edges, is_cyclic_component, strongly_connected_components};
use crate::system::{FiniteMetricSystem, Subset};

pub use theorem::{theorem_1_1_verify, FamilyMember, Side, Theorem11Report, Verdict};

/// `E_δ = {(x, y) : d(f(x), y) <= δ}`, adjacency lists sorted by target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainGraph {
    pub system_id: u64,
    pub delta: f64,
    pub adj: Vec<Vec<usize>>,
}

impl ChainGraph {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adj[x].binary_search(&y).is_ok()
    }
}

pub fn chain_graph(sys: &FiniteMetricSystem, delta: f64) -> Result<ChainGraph> {
    chain_graph_within(sys, &sys.all(), delta)
}

/// The δ-chain graph induced on `within` (other states get no edges).
pub fn chain_graph_within(sys: &FiniteMetricSystem, within: &Subset, delta: f64) -> Result<ChainGraph> {
    sys.check_subset(within)?;
    if !(delta >= 0.0) {
        return Err(invalid(format!("delta must be non-negative, got {delta}")));
    }
    let tol = sys.tolerance();
    let members: Vec<usize> = within.iter().collect();
    let adj = (0..sys.len())
        .into_par_iter()
        .map(|x| {
            if !within.contains(x) {
                return Vec::new();
            }
            let fx = sys.apply(x);
            members.iter().copied().filter(|&y| tol.le(sys.dist(fx, y), delta)).collect()
        })
        .collect();
    Ok(ChainGraph { system_id: sys.id(), delta, adj })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDecomposition {
    pub delta: f64,
    /// States lying on some δ-cycle of at least one edge.
    pub cr: Subset,
    /// Chain components (cyclic SCCs), sorted by least member.
    pub components: Vec<Vec<usize>>,
    /// Every component is chain transitive by construction.
    pub transitive: Vec<bool>,
    /// Edges of the condensation DAG between components (indices into
    /// `components`); non-recurrent transit states are not represented.
    pub condensation: Vec<(usize, usize)>,
}

impl ChainDecomposition {
    pub fn from_graph(sys: &FiniteMetricSystem, g: &ChainGraph) -> Self {
        let sccs = strongly_connected_components(&g.adj);
        let comp_of = component_index(g.adj.len(), &sccs);
        let cyclic: Vec<bool> = sccs.iter().map(|c| is_cyclic_component(&g.adj, c)).collect();
        let mut renumber = vec![usize::MAX; sccs.len()];
        let mut components = Vec::new();
        for (k, c) in sccs.iter().enumerate() {
            if cyclic[k] {
                renumber[k] = components.len();
                components.push(c.clone());
            }
        }
        // reachability between recurrent components through transit states
        let dag = condensation_edges(&g.adj, &comp_of);
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); sccs.len()];
        for &(a, b) in &dag {
            succ[a].push(b);
        }
        let mut condensation = BTreeSet::new();
        for (k, _) in sccs.iter().enumerate().filter(|(k, _)| cyclic[*k]) {
            let mut stack = succ[k].clone();
            let mut seen = vec![false; sccs.len()];
            while let Some(j) = stack.pop() {
                if std::mem::replace(&mut seen[j], true) {
                    continue;
                }
                if cyclic[j] {
                    condensation.insert((renumber[k], renumber[j]));
                } else {
                    stack.extend_from_slice(&succ[j]);
                }
            }
        }
        let cr = sys.subset(components.iter().flatten().copied()).expect("in range");
        let transitive = vec![true; components.len()];
        ChainDecomposition {
            delta: g.delta,
            cr,
            components,
            transitive,
            condensation: condensation.into_iter().collect(),
        }
    }

    pub fn max_component_size(&self) -> usize {
        self.components.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn chain_components(sys: &FiniteMetricSystem, delta: f64) -> Result<ChainDecomposition> {
    let g = chain_graph(sys, delta)?;
    Ok(ChainDecomposition::from_graph(sys, &g))
}

/// Chain components of `f` with chains confined to `within`.
pub fn chain_components_within(sys: &FiniteMetricSystem, within: &Subset, delta: f64) -> Result<ChainDecomposition> {
    let g = chain_graph_within(sys, within, delta)?;
    Ok(ChainDecomposition::from_graph(sys, &g))
}

/// States with `f^j(x) = x` for some `1 <= j <= max_period`.
pub fn periodic_points(sys: &FiniteMetricSystem, max_period: usize) -> Result<Subset> {
    if max_period == 0 {
        return Err(invalid("max_period must be at least 1"));
    }
    let members = (0..sys.len()).filter(|&x| {
        let mut y = x;
        (0..max_period).any(|_| {
            y = sys.apply(y);
            y == x
        })
    });
    sys.subset(members.collect::<Vec<_>>())
}

pub fn cr_equals_per(sys: &FiniteMetricSystem, delta: f64, max_period: usize) -> Result<bool> {
    Ok(chain_components(sys, delta)?.cr == periodic_points(sys, max_period)?)
}

/// One row of the `|CR_δ|` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub delta: f64,
    pub cr_size: usize,
    pub component_sizes: Vec<usize>,
}

pub fn chain_table(sys: &FiniteMetricSystem, deltas: &[f64]) -> Result<Vec<(ChainRow, ChainDecomposition)>> {
    deltas
        .iter()
        .map(|&d| {
            let dec = chain_components(sys, d)?;
            let row = ChainRow {
                delta: d,
                cr_size: dec.cr.len(),
                component_sizes: dec.components.iter().map(Vec::len).collect(),
            };
            Ok((row, dec))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::SubshiftSystem;
    use crate::system::Metric;

    fn separated_identity(n: usize) -> FiniteMetricSystem {
        let t = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        FiniteMetricSystem::from_table(t, (0..n).collect()).unwrap()
    }

    #[test]
    fn identity_has_only_self_loops() {
        let s = separated_identity(5);
        let g = chain_graph(&s, 0.5).unwrap();
        assert!(g.adj.iter().enumerate().all(|(x, v)| v == &vec![x]));
        let dec = chain_components(&s, 0.5).unwrap();
        assert_eq!(dec.components.len(), 5);
        let g = chain_graph(&s, 1.0).unwrap();
        assert_eq!(g.edge_count(), 25);
    }

    #[test]
    fn full_shift_truncation_edges() {
        let s = FiniteMetricSystem::symbolic_truncation(&SubshiftSystem::full(2), 4).unwrap();
        let g = chain_graph(&s, 0.25).unwrap();
        let pts = s.symbolic_points().unwrap();
        for x in 0..s.len() {
            let sx = pts[x].shifted(1);
            for y in 0..s.len() {
                assert_eq!(g.has_edge(x, y), sx.window(-1, 1) == pts[y].window(-1, 1));
            }
        }
        let dec = chain_components(&s, 0.25).unwrap();
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.cr, s.all());
    }

    #[test]
    fn north_south_stand_in() {
        // fixed points at 0 and 10, transit states 1..9 moving right
        let pts: Vec<[f64; 2]> = (0..=10).map(|i| [i as f64, 0.0]).collect();
        let mut map: Vec<usize> = (0..=10).map(|i| (i + 1).min(10)).collect();
        map[0] = 0;
        let s = FiniteMetricSystem::with_map(Metric::Euclidean(pts), map, None).unwrap();
        let dec = chain_components(&s, 0.5).unwrap();
        assert_eq!(dec.cr, s.subset([0, 10]).unwrap());
        assert!(dec.condensation.is_empty());
        assert!(cr_equals_per(&s, 0.5, 11).unwrap());
        // a large delta lets chains run back
        assert_eq!(chain_components(&s, 1.0).unwrap().cr, s.all());
    }

    #[test]
    fn periodic_points_of_a_permutation() {
        let s = separated_identity(4);
        assert_eq!(periodic_points(&s, 1).unwrap(), s.all());
        assert!(cr_equals_per(&s, 0.1, 4).unwrap());
    }
}
