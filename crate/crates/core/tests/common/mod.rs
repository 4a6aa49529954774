#![allow(dead_code)]

pub mod props;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topodyn::generators::{cantor_fan, circle_accumulation};
use topodyn::symbolic::{SubshiftSystem, Symbol};
use topodyn::{FiniteMetricSystem, Metric, Subset};

pub const SLACK: f64 = 1e-12;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random points of the unit square under a random permutation.
pub fn random_permutation_system(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSystem {
    let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(rng);
    FiniteMetricSystem::new(Metric::Euclidean(pts), map, None).unwrap()
}

/// Random nonempty 1-step SFT; every symbol keeps at least one successor.
pub fn random_sft(rng: &mut ChaCha8Rng, alphabet: usize) -> SubshiftSystem {
    loop {
        let mut pairs = Vec::new();
        for a in 0..alphabet as Symbol {
            for b in 0..alphabet as Symbol {
                if rng.gen_bool(0.6) {
                    pairs.push((a, b));
                }
            }
        }
        if let Ok(s) = SubshiftSystem::from_transitions(alphabet, &pairs) {
            if !s.is_empty() && !s.periodic_points(4).is_empty() {
                return s;
            }
        }
    }
}

pub fn random_truncation(rng: &mut ChaCha8Rng) -> FiniteMetricSystem {
    loop {
        let m = rng.gen_range(2..=3);
        let p = if m == 2 { rng.gen_range(2..=7) } else { rng.gen_range(2..=4) };
        let s = random_sft(rng, m);
        let sys = FiniteMetricSystem::symbolic_truncation(&s, p).unwrap();
        if !sys.is_empty() {
            return sys;
        }
    }
}

/// Fixed systems plus seeded random ones.
pub fn corpus() -> Vec<(String, FiniteMetricSystem)> {
    let mut out = vec![
        ("full2 P<=6".to_string(), FiniteMetricSystem::symbolic_truncation(&SubshiftSystem::full(2), 6).unwrap()),
        ("golden P<=8".to_string(), FiniteMetricSystem::symbolic_truncation(&SubshiftSystem::golden_mean(), 8).unwrap()),
        ("cantor_fan(4,3)".to_string(), cantor_fan(4, 3).unwrap().system),
        ("circle(5)".to_string(), circle_accumulation(5).unwrap().system),
    ];
    let mut r = rng(2024);
    for i in 0..12 {
        let n = r.gen_range(1..=40);
        out.push((format!("permutation #{i}"), random_permutation_system(&mut r, n)));
        out.push((format!("truncation #{i}"), random_truncation(&mut r)));
    }
    out
}

/// Chain components by transitive closure: `x ~ y` iff each reaches the
/// other, `x` recurrent iff it reaches itself in at least one step.
pub fn closure_components(sys: &FiniteMetricSystem, delta: f64) -> BTreeSet<BTreeSet<usize>> {
    let n = sys.len();
    let mut reach = vec![vec![false; n]; n];
    for x in 0..n {
        let fx = sys.apply(x);
        for y in 0..n {
            reach[x][y] = sys.dist(fx, y) <= delta + SLACK;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    (0..n)
        .filter(|&x| reach[x][x])
        .map(|x| (0..n).filter(|&y| reach[x][y] && reach[y][x]).collect())
        .collect()
}

pub fn as_sets(components: &[Vec<usize>]) -> BTreeSet<BTreeSet<usize>> {
    components.iter().map(|c| c.iter().copied().collect()).collect()
}

pub fn members(s: &Subset) -> BTreeSet<usize> {
    s.iter().collect()
}

/// Cycles of a permutation.
pub fn cycles(sys: &FiniteMetricSystem) -> Vec<Vec<usize>> {
    let mut seen = vec![false; sys.len()];
    let mut out = Vec::new();
    for x in 0..sys.len() {
        if seen[x] {
            continue;
        }
        let mut c = Vec::new();
        let mut y = x;
        while !seen[y] {
            seen[y] = true;
            c.push(y);
            y = sys.apply(y);
        }
        out.push(c);
    }
    out
}

/// Largest invariant subset of `set` for a bijection: the cycles inside it.
pub fn largest_invariant_inside(sys: &FiniteMetricSystem, set: &BTreeSet<usize>) -> BTreeSet<usize> {
    cycles(sys).into_iter().filter(|c| c.iter().all(|x| set.contains(x))).flatten().collect()
}

/// Dyadic radii `2^-1 .. 2^-k`.
pub fn dyadics(k: u32) -> Vec<f64> {
    (1..=k).map(|i| 0.5f64.powi(i as i32)).collect()
}
