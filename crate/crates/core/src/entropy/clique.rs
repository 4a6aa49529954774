//! Exact maximum clique by branch and bound with a greedy colouring bound.

#[derive(Debug, Clone)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn and_not(&self, other: &BitSet) -> BitSet {
        BitSet { words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect() }
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| k * 64 + w.trailing_zeros() as usize)
    }
}

/// A maximum clique of the undirected graph `adj` (symmetric adjacency
/// lists, no self-loops), as sorted vertex ids.
pub fn maximum_clique(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let nbr: Vec<BitSet> = adj
        .iter()
        .map(|out| {
            let mut b = BitSet::new(n);
            out.iter().for_each(|&w| b.insert(w));
            b
        })
        .collect();
    let mut all = BitSet::new(n);
    (0..n).for_each(|v| all.insert(v));
    let mut best = Vec::new();
    let mut current = Vec::new();
    expand(&nbr, all, &mut current, &mut best);
    best.sort_unstable();
    best
}

/// Greedy sequential colouring of `p`; returns vertices in colour order
/// with the colour count reached at each.
fn colour_order(nbr: &[BitSet], p: &BitSet) -> Vec<(usize, usize)> {
    let mut uncoloured = p.clone();
    let mut order = Vec::new();
    let mut colour = 0;
    while !uncoloured.is_empty() {
        colour += 1;
        let mut q = uncoloured.clone();
        while let Some(v) = q.first() {
            q.remove(v);
            uncoloured.remove(v);
            order.push((v, colour));
            q = q.and_not(&nbr[v]);
        }
    }
    order
}

fn expand(nbr: &[BitSet], mut p: BitSet, current: &mut Vec<usize>, best: &mut Vec<usize>) {
    let order = colour_order(nbr, &p);
    for &(v, colour) in order.iter().rev() {
        if current.len() + colour <= best.len() {
            return;
        }
        current.push(v);
        let next = p.and(&nbr[v]);
        if next.is_empty() {
            if current.len() > best.len() {
                *best = current.clone();
            }
        } else {
            expand(nbr, next, current, best);
        }
        current.pop();
        p.remove(v);
    }
}
