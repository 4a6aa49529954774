use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::language::Sublanguage;
use super::point::{Symbol, SymbolicPoint};
use crate::error::{invalid, DynError, Result};
use crate::metric::{dyadic, dyadic_exponent_at_most};
use crate::system::Dynamics;

/// A subshift of finite type in 1-step (vertex) presentation.
///
/// Multi-step word presentations are recoded on construction: the alphabet
/// becomes the set of `(L-1)`-blocks and `block_labels` remembers them. The
/// transition relation is always pruned to its bi-infinite core.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubshiftSystem {
    alphabet: usize,
    allowed: Vec<Vec<bool>>,
    alive: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block_labels: Option<Vec<Vec<Symbol>>>,
}

/// Output of [`SubshiftSystem::expansivity_constant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansivityCertificate {
    pub constant: f64,
    /// Window radius on which agreement is forced by `d <= constant`.
    pub window: u32,
    pub symbol_pairs_checked: usize,
}

impl SubshiftSystem {
    pub fn from_matrix(allowed: Vec<Vec<bool>>) -> Result<Self> {
        let m = allowed.len();
        if m == 0 {
            return Err(invalid("alphabet must be nonempty"));
        }
        if allowed.iter().any(|row| row.len() != m) {
            return Err(invalid("transition matrix must be square"));
        }
        let mut s = SubshiftSystem { alphabet: m, allowed, alive: vec![true; m], block_labels: None };
        s.prune();
        Ok(s)
    }

    pub fn from_transitions(alphabet: usize, pairs: &[(Symbol, Symbol)]) -> Result<Self> {
        let mut allowed = vec![vec![false; alphabet]; alphabet];
        for &(a, b) in pairs {
            for s in [a, b] {
                if s as usize >= alphabet {
                    return Err(DynError::SymbolOutOfRange { symbol: s, alphabet });
                }
            }
            allowed[a as usize][b as usize] = true;
        }
        Self::from_matrix(allowed)
    }

    pub fn full(alphabet: usize) -> Self {
        Self::from_matrix(vec![vec![true; alphabet]; alphabet]).expect("nonempty alphabet")
    }

    /// Binary sequences without two consecutive ones.
    pub fn golden_mean() -> Self {
        Self::from_transitions(2, &[(0, 0), (0, 1), (1, 0)]).unwrap()
    }

    /// SFT of all sequences whose length-`len` windows lie in `words`.
    pub fn from_words(alphabet: usize, len: usize, words: &[Vec<Symbol>]) -> Result<Self> {
        if len == 0 {
            return Err(invalid("word length must be positive"));
        }
        for w in words {
            if w.len() != len {
                return Err(invalid(format!("word of length {} in a length-{len} list", w.len())));
            }
            if let Some(&s) = w.iter().find(|&&s| s as usize >= alphabet) {
                return Err(DynError::SymbolOutOfRange { symbol: s, alphabet });
            }
        }
        match len {
            1 => {
                let mut allowed = vec![vec![false; alphabet]; alphabet];
                let syms: BTreeSet<usize> = words.iter().map(|w| w[0] as usize).collect();
                for &a in &syms {
                    for &b in &syms {
                        allowed[a][b] = true;
                    }
                }
                Self::from_matrix(allowed)
            }
            2 => {
                let pairs: Vec<_> = words.iter().map(|w| (w[0], w[1])).collect();
                Self::from_transitions(alphabet, &pairs)
            }
            _ => {
                let mut blocks: BTreeMap<Vec<Symbol>, usize> = BTreeMap::new();
                for w in words {
                    for b in [&w[..len - 1], &w[1..]] {
                        let next = blocks.len();
                        blocks.entry(b.to_vec()).or_insert(next);
                    }
                }
                let mut labels = vec![Vec::new(); blocks.len()];
                for (b, &i) in &blocks {
                    labels[i] = b.clone();
                }
                let k = blocks.len();
                let mut allowed = vec![vec![false; k]; k];
                for w in words {
                    allowed[blocks[&w[..len - 1]]][blocks[&w[1..]]] = true;
                }
                let mut s = Self::from_matrix(allowed)?;
                s.block_labels = Some(labels);
                Ok(s)
            }
        }
    }

    /// Higher block presentation on `k`-blocks; conjugate to `self`.
    pub fn higher_block(&self, k: usize) -> Result<Self> {
        if k <= 1 {
            return Ok(self.clone());
        }
        let words = self.words(k + 1);
        let mut s = Self::from_words(self.alphabet, k + 1, &words)?;
        if s.block_labels.is_none() {
            s.block_labels = Some((0..s.alphabet as Symbol).map(|a| vec![a]).collect());
        }
        Ok(s)
    }

    fn prune(&mut self) {
        let m = self.alphabet;
        loop {
            let mut changed = false;
            for a in 0..m {
                if !self.alive[a] {
                    continue;
                }
                let has_succ = (0..m).any(|b| self.alive[b] && self.allowed[a][b]);
                let has_pred = (0..m).any(|b| self.alive[b] && self.allowed[b][a]);
                if !(has_succ && has_pred) {
                    self.alive[a] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for a in 0..m {
            for b in 0..m {
                if !(self.alive[a] && self.alive[b]) {
                    self.allowed[a][b] = false;
                }
            }
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn block_labels(&self) -> Option<&[Vec<Symbol>]> {
        self.block_labels.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        !self.alive.iter().any(|&a| a)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.alphabet).filter(|&a| self.alive[a]).map(|a| a as Symbol)
    }

    #[inline]
    pub fn allows(&self, a: Symbol, b: Symbol) -> bool {
        self.allowed
            .get(a as usize)
            .and_then(|row| row.get(b as usize))
            .copied()
            .unwrap_or(false)
    }

    pub fn successors(&self, a: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.alphabet as Symbol).filter(move |&b| self.allows(a, b))
    }

    pub fn predecessors(&self, b: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.alphabet as Symbol).filter(move |&a| self.allows(a, b))
    }

    pub fn transition_pairs(&self) -> Vec<(Symbol, Symbol)> {
        let mut out = Vec::new();
        for a in self.symbols() {
            for b in self.successors(a) {
                out.push((a, b));
            }
        }
        out
    }

    /// Adjacency lists of the pruned transition graph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.alphabet)
            .map(|a| self.successors(a as Symbol).map(|b| b as usize).collect())
            .collect()
    }

    pub fn check_point(&self, x: &SymbolicPoint) -> Result<()> {
        if let Some(s) = [x.left_period(), x.center(), x.right_period()]
            .iter()
            .flat_map(|w| w.iter())
            .find(|&&s| s as usize >= self.alphabet)
        {
            return Err(DynError::SymbolOutOfRange { symbol: *s, alphabet: self.alphabet });
        }
        let lo = x.base() - x.left_period().len() as i64 - 1;
        let hi = x.end() + x.right_period().len() as i64 + 1;
        for i in lo..hi {
            if !self.allows(x.symbol_at(i), x.symbol_at(i + 1)) {
                return Err(DynError::ForbiddenTransition(i));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &SymbolicPoint) -> bool {
        self.check_point(x).is_ok()
    }

    /// Allowed words of length `len` (paths in the pruned graph), sorted.
    pub fn words(&self, len: usize) -> Vec<Vec<Symbol>> {
        if len == 0 {
            return vec![Vec::new()];
        }
        let mut out: Vec<Vec<Symbol>> = self.symbols().map(|a| vec![a]).collect();
        for _ in 1..len {
            let mut next = Vec::with_capacity(out.len() * 2);
            for w in &out {
                for b in self.successors(*w.last().unwrap()) {
                    let mut v = w.clone();
                    v.push(b);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Number of allowed words of each length `1..=max_len`, as `f64`.
    pub fn word_counts(&self, max_len: usize) -> Vec<f64> {
        let mut paths: Vec<f64> = (0..self.alphabet).map(|a| if self.alive[a] { 1.0 } else { 0.0 }).collect();
        let mut counts = Vec::with_capacity(max_len);
        for len in 1..=max_len {
            counts.push(paths.iter().sum());
            if len == max_len {
                break;
            }
            let mut next = vec![0.0; self.alphabet];
            for (a, &c) in paths.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                for b in self.successors(a as Symbol) {
                    next[b as usize] += c;
                }
            }
            paths = next;
        }
        counts
    }

    /// Every point of least period `<= max_period`, sorted.
    pub fn periodic_points(&self, max_period: usize) -> Vec<SymbolicPoint> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<Vec<Symbol>> = self.symbols().map(|a| vec![a]).collect();
        while let Some(w) = stack.pop() {
            let first = w[0];
            let last = *w.last().unwrap();
            if self.allows(last, first) {
                let p = SymbolicPoint::periodic(&w).expect("nonempty word");
                if p.period() == Some(w.len()) {
                    out.insert(p);
                }
            }
            if w.len() < max_period {
                for b in self.successors(last) {
                    let mut v = w.clone();
                    v.push(b);
                    stack.push(v);
                }
            }
        }
        out.into_iter().collect()
    }

    /// The language as an edge-labelled graph over this system's alphabet.
    pub fn language(&self) -> Sublanguage {
        let edges = self
            .transition_pairs()
            .into_iter()
            .map(|(a, b)| (a as usize, a, b as usize))
            .collect();
        Sublanguage::from_edges(self.alphabet, self.alphabet, edges)
    }

    /// For a recoded system, the language over the original symbols (each
    /// block read by its first symbol).
    pub fn original_language(&self) -> Sublanguage {
        let Some(labels) = &self.block_labels else {
            return self.language();
        };
        let edges = self
            .transition_pairs()
            .into_iter()
            .map(|(a, b)| (a as usize, labels[a as usize][0], b as usize))
            .collect();
        let alphabet = labels.iter().flatten().map(|&s| s as usize + 1).max().unwrap_or(1);
        Sublanguage::from_edges(alphabet, self.alphabet, edges)
    }

    /// `2^-k`, `k` the least `|i|` with `p_i != q_i`; 0 iff `p == q`.
    pub fn shift_metric(&self, p: &SymbolicPoint, q: &SymbolicPoint) -> Result<f64> {
        for x in [p, q] {
            let m = x.max_symbol() as usize;
            if m >= self.alphabet {
                return Err(DynError::AlphabetMismatch(m + 1, self.alphabet));
            }
        }
        Ok(shift_distance(p, q))
    }

    /// Certifies `e = 1/2`: `d(x, y) <= 1/2` forces `x_0 = y_0`, so a bounded
    /// orbit distance forces agreement everywhere. Checked over every pair of
    /// distinct symbols (their cylinders are at distance 1).
    pub fn expansivity_constant(&self) -> ExpansivityCertificate {
        let syms: Vec<Symbol> = self.symbols().collect();
        let mut checked = 0usize;
        for (i, &a) in syms.iter().enumerate() {
            for &b in &syms[i + 1..] {
                let pa = SymbolicPoint::with_block(a, 0, &[a]);
                let pb = SymbolicPoint::with_block(b, 0, &[b]);
                // both differ at index 0, so their distance is exactly 1
                debug_assert_eq!(shift_distance(&pa, &pb), 1.0);
                checked += 1;
            }
        }
        ExpansivityCertificate { constant: 0.5, window: 0, symbol_pairs_checked: checked }
    }

    /// Least `n` such that `sup_{|i| <= n} d(s^i x, s^i y) <= e` implies
    /// `d(x, y) <= eps`, verified exhaustively over central words.
    pub fn uniform_expansivity_horizon(&self, e: f64, eps: f64) -> Result<usize> {
        if !(e > 0.0 && e < 1.0) {
            return Err(invalid(format!("{e} is not an expansive constant for the shift metric")));
        }
        if eps <= 0.0 {
            return Err(invalid("eps must be positive"));
        }
        // d <= e  <=>  agreement on |j| < ke ;  d <= eps  <=>  agreement on |j| < keps
        let ke = dyadic_exponent_at_most(e).unwrap() as usize;
        let keps = dyadic_exponent_at_most(eps).ok_or_else(|| invalid("eps too small"))? as usize;
        if keps == 0 {
            return Ok(0);
        }
        let target_radius = keps - 1;
        let words = self.words(2 * target_radius + 1);
        for n in 0usize.. {
            let radius = n + ke - 1;
            if radius >= target_radius {
                return Ok(n);
            }
            // injectivity of the restriction to the central (2 radius + 1)-window
            let cut = target_radius - radius;
            let mut seen: BTreeMap<&[Symbol], &[Symbol]> = BTreeMap::new();
            let mut injective = true;
            for w in &words {
                let core = &w[cut..w.len() - cut];
                match seen.get(core) {
                    Some(prev) if *prev != w.as_slice() => {
                        injective = false;
                        break;
                    }
                    _ => {
                        seen.insert(core, w);
                    }
                }
            }
            if injective {
                return Ok(n);
            }
        }
        unreachable!()
    }
}

pub(crate) fn shift_distance(p: &SymbolicPoint, q: &SymbolicPoint) -> f64 {
    match p.first_disagreement(q) {
        None => 0.0,
        Some(k) => dyadic(k.min(1074) as u32),
    }
}

impl Dynamics for SubshiftSystem {
    type Point = SymbolicPoint;

    fn image(&self, x: &SymbolicPoint) -> SymbolicPoint {
        x.shifted(1)
    }

    fn distance(&self, x: &SymbolicPoint, y: &SymbolicPoint) -> f64 {
        shift_distance(x, y)
    }

    fn iterate(&self, x: &SymbolicPoint, n: usize) -> SymbolicPoint {
        x.shifted(n as i64)
    }

    fn iterate_signed(&self, x: &SymbolicPoint, i: i64) -> Option<SymbolicPoint> {
        Some(x.shifted(i))
    }
}
