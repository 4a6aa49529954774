//! Shift-invariant languages presented by edge-labelled graphs.
//!
//! Sub-subshifts (Λ, Σ, Ξ, Γ_c in the model builder) are handled through
//! their languages, never by enumerating points.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::point::{Symbol, SymbolicPoint};
use crate::error::{invalid, Result};
use crate::graph::strongly_connected_components;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sublanguage {
    alphabet: usize,
    states: usize,
    /// `(from, label, to)`, sorted and deduplicated, pruned to the essential
    /// part (every state has an incoming and an outgoing edge).
    edges: Vec<(usize, Symbol, usize)>,
}

impl Sublanguage {
    pub fn from_edges(alphabet: usize, states: usize, mut edges: Vec<(usize, Symbol, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut alive = vec![true; states];
        loop {
            let mut has_out = vec![false; states];
            let mut has_in = vec![false; states];
            for &(a, _, b) in &edges {
                if alive[a] && alive[b] {
                    has_out[a] = true;
                    has_in[b] = true;
                }
            }
            let mut changed = false;
            for s in 0..states {
                if alive[s] && !(has_out[s] && has_in[s]) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        edges.retain(|&(a, _, b)| alive[a] && alive[b]);
        // renumber surviving states densely
        let mut id = vec![usize::MAX; states];
        let mut next = 0;
        for s in 0..states {
            if alive[s] {
                id[s] = next;
                next += 1;
            }
        }
        let edges = edges.into_iter().map(|(a, l, b)| (id[a], l, id[b])).collect::<Vec<_>>();
        let mut lang = Sublanguage { alphabet, states: next, edges };
        lang.edges.sort_unstable();
        lang
    }

    /// All sequences whose length-`len` windows lie in `words`.
    pub fn from_window_words(alphabet: usize, len: usize, words: &[Vec<Symbol>]) -> Result<Self> {
        if len == 0 {
            return Err(invalid("window length must be positive"));
        }
        if words.iter().any(|w| w.len() != len) {
            return Err(invalid("window words must share one length"));
        }
        if len == 1 {
            let edges = words.iter().map(|w| (0usize, w[0], 0usize)).collect();
            return Ok(Self::from_edges(alphabet, 1, edges));
        }
        let mut blocks: BTreeMap<&[Symbol], usize> = BTreeMap::new();
        for w in words {
            for b in [&w[..len - 1], &w[1..]] {
                let n = blocks.len();
                blocks.entry(b).or_insert(n);
            }
        }
        let edges = words
            .iter()
            .map(|w| (blocks[&w[..len - 1]], w[0], blocks[&w[1..]]))
            .collect();
        Ok(Self::from_edges(alphabet, blocks.len(), edges))
    }

    /// The orbit of the periodic point `word^inf`.
    pub fn periodic_orbit(alphabet: usize, word: &[Symbol]) -> Result<Self> {
        if word.is_empty() {
            return Err(invalid("empty period word"));
        }
        let p = word.len();
        let edges = (0..p).map(|i| (i, word[i], (i + 1) % p)).collect();
        Ok(Self::from_edges(alphabet, p, edges))
    }

    /// Orbit closure of the point with a single `marker` on a `fill`
    /// background: words with at most one marker.
    pub fn single_marker_closure(alphabet: usize, fill: Symbol, marker: Symbol) -> Self {
        Self::from_edges(alphabet, 2, vec![(0, fill, 0), (0, marker, 1), (1, fill, 1)])
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn edges(&self) -> &[(usize, Symbol, usize)] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.states == 0
    }

    fn step(&self, from: &BTreeSet<usize>, label: Symbol) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter(|&&(a, l, _)| l == label && from.contains(&a))
            .map(|&(_, _, b)| b)
            .collect()
    }

    fn all_states(&self) -> BTreeSet<usize> {
        (0..self.states).collect()
    }

    fn labels(&self) -> BTreeSet<Symbol> {
        self.edges.iter().map(|&(_, l, _)| l).collect()
    }

    pub fn contains_word(&self, w: &[Symbol]) -> bool {
        let mut cur = self.all_states();
        for &s in w {
            cur = self.step(&cur, s);
            if cur.is_empty() {
                return false;
            }
        }
        !cur.is_empty()
    }

    /// Words of length `len` occurring in points of the subshift, sorted.
    pub fn words(&self, len: usize) -> BTreeSet<Vec<Symbol>> {
        let labels = self.labels();
        let mut frontier: Vec<(Vec<Symbol>, BTreeSet<usize>)> = vec![(Vec::new(), self.all_states())];
        for _ in 0..len {
            let mut next = Vec::new();
            for (w, set) in &frontier {
                for &l in &labels {
                    let s = self.step(set, l);
                    if !s.is_empty() {
                        let mut v = w.clone();
                        v.push(l);
                        next.push((v, s));
                    }
                }
            }
            frontier = next;
        }
        if self.is_empty() {
            return BTreeSet::new();
        }
        frontier.into_iter().map(|(w, _)| w).collect()
    }

    /// `L_n(self) ⊆ L_n(other)` for every `n <= max_len`.
    pub fn language_subset_of(&self, other: &Sublanguage, max_len: usize) -> bool {
        (1..=max_len).all(|n| self.words(n).iter().all(|w| other.contains_word(w)))
    }

    pub fn language_equals(&self, other: &Sublanguage, max_len: usize) -> bool {
        (1..=max_len).all(|n| self.words(n) == other.words(n))
    }

    /// Exact inclusion `L(self) ⊆ L(other)` by a product search against the
    /// subset construction of `other`.
    pub fn is_sublanguage_of(&self, other: &Sublanguage) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let mut seen: BTreeSet<(usize, BTreeSet<usize>)> = BTreeSet::new();
        let mut queue = VecDeque::new();
        for q in 0..self.states {
            let start = (q, other.all_states());
            if seen.insert(start.clone()) {
                queue.push_back(start);
            }
        }
        while let Some((q, set)) = queue.pop_front() {
            for &(_, l, q2) in self.edges.iter().filter(|e| e.0 == q) {
                let t = other.step(&set, l);
                if t.is_empty() {
                    return false;
                }
                let next = (q2, t);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        true
    }

    pub fn same_language(&self, other: &Sublanguage) -> bool {
        self.is_sublanguage_of(other) && other.is_sublanguage_of(self)
    }

    pub fn relabel(&self, alphabet: usize, map: impl Fn(Symbol) -> Symbol) -> Self {
        let edges = self.edges.iter().map(|&(a, l, b)| (a, map(l), b)).collect();
        Self::from_edges(alphabet, self.states, edges)
    }

    /// Image under the sliding block code `x -> (code(x_{j-r..=j+r}))_j`.
    /// `code` returning `None` marks a window as impossible.
    pub fn block_image(
        &self,
        alphabet: usize,
        radius: usize,
        code: impl Fn(&[Symbol]) -> Option<Symbol>,
    ) -> Self {
        if radius == 0 {
            let edges = self
                .edges
                .iter()
                .filter_map(|&(a, l, b)| code(&[l]).map(|m| (a, m, b)))
                .collect();
            return Self::from_edges(alphabet, self.states, edges);
        }
        // states: paths of 2r edges; an edge appends one more
        let width = 2 * radius;
        let mut paths: Vec<Vec<usize>> = (0..self.edges.len()).map(|e| vec![e]).collect();
        for _ in 1..width {
            let mut next = Vec::new();
            for p in &paths {
                let end = self.edges[*p.last().unwrap()].2;
                for (e, &(a, _, _)) in self.edges.iter().enumerate() {
                    if a == end {
                        let mut q = p.clone();
                        q.push(e);
                        next.push(q);
                    }
                }
            }
            paths = next;
        }
        let index: BTreeMap<Vec<usize>, usize> = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut edges = Vec::new();
        for p in &paths {
            let end = self.edges[*p.last().unwrap()].2;
            for (e, &(a, l, _)) in self.edges.iter().enumerate() {
                if a != end {
                    continue;
                }
                let mut window: Vec<Symbol> = p.iter().map(|&k| self.edges[k].1).collect();
                window.push(l);
                if let Some(m) = code(&window) {
                    let mut q = p[1..].to_vec();
                    q.push(e);
                    edges.push((index[p], m, index[&q]));
                }
            }
        }
        Self::from_edges(alphabet, paths.len(), edges)
    }

    /// Right-resolving presentation by subset construction, as adjacency
    /// lists with multiplicity.
    pub fn determinized_adjacency(&self) -> Vec<Vec<usize>> {
        let labels = self.labels();
        let start = self.all_states();
        let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut queue = VecDeque::new();
        ids.insert(start.clone(), 0);
        queue.push_back(start);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(set) = queue.pop_front() {
            let from = ids[&set];
            for &l in &labels {
                let t = self.step(&set, l);
                if t.is_empty() {
                    continue;
                }
                let to = match ids.get(&t) {
                    Some(&i) => i,
                    None => {
                        let i = ids.len();
                        ids.insert(t.clone(), i);
                        adj.push(Vec::new());
                        queue.push_back(t);
                        i
                    }
                };
                adj[from].push(to);
            }
        }
        adj
    }

    /// Some eventually periodic point of the subshift carrying `word` on
    /// `[0, word.len())`.
    pub fn sample_point(&self, word: &[Symbol]) -> Option<SymbolicPoint> {
        // find a path spelling the word
        let mut layer: Vec<BTreeMap<usize, usize>> = Vec::new(); // state -> predecessor state
        let mut cur: BTreeSet<usize> = self.all_states();
        for &s in word {
            let mut back = BTreeMap::new();
            for &(a, l, b) in &self.edges {
                if l == s && cur.contains(&a) {
                    back.entry(b).or_insert(a);
                }
            }
            cur = back.keys().copied().collect();
            if cur.is_empty() {
                return None;
            }
            layer.push(back);
        }
        let end = *cur.iter().next()?;
        let mut path_states = vec![end];
        for back in layer.iter().rev() {
            let prev = back[path_states.last().unwrap()];
            path_states.push(prev);
        }
        path_states.reverse();
        let start = path_states[0];

        // forward from `end`: follow the smallest outgoing edge until a state repeats
        let (fwd_pre, fwd_cycle) = self.walk(end, true);
        let (bwd_pre, bwd_cycle) = self.walk(start, false);
        // bwd_pre is listed walking backwards from start; reverse into reading order
        let mut center: Vec<Symbol> = bwd_pre.into_iter().rev().collect();
        let lead = center.len() as i64;
        center.extend_from_slice(word);
        center.extend(fwd_pre);
        let left: Vec<Symbol> = bwd_cycle.into_iter().rev().collect();
        SymbolicPoint::new(left, center, fwd_cycle, -lead).ok()
    }

    /// Deterministic walk from `state`; returns the labels before the cycle
    /// and the labels of the cycle, in walking order.
    fn walk(&self, state: usize, forward: bool) -> (Vec<Symbol>, Vec<Symbol>) {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut labels = Vec::new();
        let mut s = state;
        loop {
            if let Some(&pos) = seen.get(&s) {
                let cycle = labels[pos..].to_vec();
                labels.truncate(pos);
                return (labels, cycle);
            }
            seen.insert(s, labels.len());
            let &(a, l, b) = if forward {
                self.edges.iter().find(|e| e.0 == s)
            } else {
                self.edges.iter().find(|e| e.2 == s)
            }
            .expect("essential graph");
            labels.push(l);
            s = if forward { b } else { a };
        }
    }

    /// Whether the periodic point `word^inf` belongs to the subshift.
    pub fn contains_periodic(&self, word: &[Symbol]) -> bool {
        if word.is_empty() {
            return false;
        }
        // relation R: s -> t when a path from s to t spells `word`
        let adj: Vec<Vec<usize>> = (0..self.states)
            .map(|s| {
                let mut set = BTreeSet::from([s]);
                for &l in word {
                    set = self.step(&set, l);
                }
                set.into_iter().collect()
            })
            .collect();
        strongly_connected_components(&adj)
            .iter()
            .any(|c| crate::graph::is_cyclic_component(&adj, c))
    }

    /// Every point of least period `<= max_period`, sorted.
    pub fn periodic_points(&self, max_period: usize) -> Vec<SymbolicPoint> {
        let mut out = BTreeSet::new();
        for p in 1..=max_period {
            for w in self.words(p) {
                let x = SymbolicPoint::periodic(&w).expect("nonempty");
                if x.period() == Some(p) && self.contains_periodic(&w) {
                    out.insert(x);
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn contains_point(&self, x: &SymbolicPoint, check_len: usize) -> bool {
        let lo = x.base() - (x.left_period().len() + check_len) as i64;
        let hi = x.end() + (x.right_period().len() + check_len) as i64;
        self.contains_word(&x.window(lo, hi))
    }
}
