//! Randomized properties, shared by the property tests and the acceptance run.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::seq::SliceRandom;
use rand::Rng;

use super::*;
use topodyn::chaos::sensitive_points;
use topodyn::entropy::{entropy_estimate, separated_set, sft_entropy, SeparationMode};
use topodyn::pseudo::{is_shadowed_by, PseudoOrbit};
use topodyn::symbolic::{constructive_shadow, is_locally_maximal, Sublanguage, SymbolicPoint};
use topodyn::topology::{accumulation_set, build_ball, invariant_core};
use topodyn::FiniteMetricSystem;

type Outcome = std::result::Result<(), TestCaseError>;

pub fn small_system(seed: u64) -> FiniteMetricSystem {
    let mut r = rng(seed);
    if seed % 3 == 0 {
        random_truncation(&mut r)
    } else {
        let n = r.gen_range(1..=12);
        random_permutation_system(&mut r, n)
    }
}

/// At most 40 states, inside the exact clique cap.
pub fn tiny_system(seed: u64) -> FiniteMetricSystem {
    (0..).map(|i| small_system(seed.wrapping_add(3 * i))).find(|s| s.len() <= 40).unwrap()
}

fn random_subset(sys: &FiniteMetricSystem, seed: u64) -> BTreeSet<usize> {
    let mut r = rng(seed ^ 0x5eed);
    let mut s: BTreeSet<usize> = (0..sys.len()).filter(|_| r.gen_bool(0.3)).collect();
    s.insert(seed as usize % sys.len());
    s
}

/// Union of a random nonempty selection of cycles.
fn random_invariant(sys: &FiniteMetricSystem, seed: u64) -> BTreeSet<usize> {
    let mut cs = cycles(sys);
    let mut r = rng(seed ^ 0xc1c1e);
    cs.shuffle(&mut r);
    let keep = r.gen_range(1..=cs.len());
    cs.into_iter().take(keep).flatten().collect()
}

fn random_shift(r: &mut rand_chacha::ChaCha8Rng) -> topodyn::symbolic::SubshiftSystem {
    let m = r.gen_range(2..=3);
    random_sft(r, m)
}

pub fn ball_monotone((seed, r1, r2): (u64, f64, f64)) -> Outcome {
    let sys = small_system(seed);
    let s = sys.subset(random_subset(&sys, seed)).unwrap();
    let (lo, hi) = (r1.min(r2), r1.max(r2));
    let small = build_ball(&sys, &s, lo).unwrap();
    let big = build_ball(&sys, &s, hi).unwrap();
    prop_assert!(s.is_subset(&small));
    prop_assert!(small.is_subset(&big));
    Ok(())
}

pub fn core_monotone((seed, r): (u64, f64)) -> Outcome {
    let sys = small_system(seed);
    let s = sys.subset(random_subset(&sys, seed)).unwrap();
    let mut prev = build_ball(&sys, &s, r).unwrap();
    for h in 0..=sys.len() {
        let c = invariant_core(&sys, &s, r, Some(h)).unwrap();
        prop_assert!(c.core.is_subset(&prev));
        prev = c.core;
    }
    let full = invariant_core(&sys, &s, r, None).unwrap();
    prop_assert!(full.stabilized());
    prop_assert_eq!(members(&sys.image_of(&full.core)), members(&full.core));
    // oracle: the cycles lying wholly in the ball
    let ball = members(&build_ball(&sys, &s, r).unwrap());
    prop_assert_eq!(members(&full.core), largest_invariant_inside(&sys, &ball));
    Ok(())
}

pub fn accumulation_monotone((seed, r1, r2): (u64, f64, f64)) -> Outcome {
    let sys = small_system(seed);
    let (lo, hi) = (r1.min(r2), r1.max(r2));
    prop_assert!(accumulation_set(&sys, lo).unwrap().is_subset(&accumulation_set(&sys, hi).unwrap()));
    Ok(())
}

pub fn sensitive_in_accumulation((seed, a): (u64, f64)) -> Outcome {
    // every state of a permutation is periodic; the resolution is the probe
    // radius each witness was found at
    let sys = small_system(seed);
    let sen = sensitive_points(&sys, &sys.all(), a).unwrap();
    prop_assert!(sen.sensitive.is_subset(&accumulation_set(&sys, 0.5).unwrap()));
    for w in &sen.witnesses {
        prop_assert!(accumulation_set(&sys, w.probe).unwrap().contains(w.x));
    }
    Ok(())
}

pub fn sensitivity_antitone((seed, a1, a2): (u64, f64, f64)) -> Outcome {
    let sys = small_system(seed);
    let k = sys.subset(random_invariant(&sys, seed)).unwrap();
    let (lo, hi) = (a1.min(a2), a1.max(a2));
    let strong = sensitive_points(&sys, &k, hi).unwrap();
    let weak = sensitive_points(&sys, &k, lo).unwrap();
    prop_assert!(strong.sensitive.is_subset(&weak.sensitive));
    for w in &strong.witnesses {
        prop_assert!(w.verify(&sys, hi));
    }
    Ok(())
}

pub fn separated_antitone_in_r((seed, n, k1, k2): (u64, usize, u32, u32)) -> Outcome {
    let sys = tiny_system(seed);
    let k = sys.subset(random_invariant(&sys, seed)).unwrap();
    let (r1, r2) = (0.5f64.powi(k1.max(k2) as i32), 0.5f64.powi(k1.min(k2) as i32));
    let fine = separated_set(&sys, &k, n, r1, SeparationMode::exact()).unwrap();
    let coarse = separated_set(&sys, &k, n, r2, SeparationMode::exact()).unwrap();
    prop_assert!(fine.size() >= coarse.size());
    let greedy = separated_set(&sys, &k, n, r1, SeparationMode::Greedy).unwrap();
    prop_assert!(fine.size() >= greedy.size());
    Ok(())
}

pub fn separated_monotone_in_k(seed: u64) -> Outcome {
    let sys = tiny_system(seed);
    let big = random_invariant(&sys, seed);
    let mut r = rng(seed ^ 7);
    let sub: Vec<Vec<usize>> = cycles(&sys).into_iter().filter(|c| big.contains(&c[0]) && r.gen_bool(0.5)).collect();
    if sub.is_empty() {
        return Ok(());
    }
    let k1 = sys.subset(sub.into_iter().flatten()).unwrap();
    let k2 = sys.subset(big).unwrap();
    let sched = dyadics(4);
    let e1 = entropy_estimate(&sys, &k1, &sched, 6, SeparationMode::exact()).unwrap();
    let e2 = entropy_estimate(&sys, &k2, &sched, 6, SeparationMode::exact()).unwrap();
    // the fitted slope itself is not monotone in K; the counts are
    for (a, b) in e1.rows.iter().zip(&e2.rows) {
        prop_assert_eq!((a.r, a.n), (b.r, b.n));
        prop_assert!(a.s_n <= b.s_n);
    }
    Ok(())
}

pub fn shadowing_sound((seed, k, len): (u64, u32, usize)) -> Outcome {
    // periodic points of a random SFT; each step jumps to a point agreeing
    // with the image on the central window |j| <= k-1
    let mut r = rng(seed);
    let shift = random_shift(&mut r);
    let pts = shift.periodic_points(6);
    let delta = 0.5f64.powi(k as i32);
    let c = (1 - k as i64, k as i64 - 1);
    let mut window = vec![pts[r.gen_range(0..pts.len())].clone()];
    for _ in 1..len {
        let image = window.last().unwrap().shifted(1);
        let near: Vec<&SymbolicPoint> = pts.iter().filter(|q| q.window(c.0, c.1) == image.window(c.0, c.1)).collect();
        window.push((*near.choose(&mut r).unwrap()).clone());
    }
    let po = PseudoOrbit::finite(0, window);
    let (y, eps) = constructive_shadow(&shift, &po, delta).unwrap();
    prop_assert_eq!(eps, delta);
    prop_assert!(shift.contains(&y));
    prop_assert!(is_shadowed_by(&shift, &po, &y, delta, Default::default()).unwrap());
    Ok(())
}

pub fn sub_sft_locally_maximal((seed, len): (u64, usize)) -> Outcome {
    let mut r = rng(seed);
    let ambient = random_shift(&mut r);
    let words: Vec<_> = ambient.words(len).into_iter().filter(|_| r.gen_bool(0.7)).collect();
    if words.is_empty() {
        return Ok(());
    }
    let g = Sublanguage::from_window_words(ambient.alphabet_size(), len, &words).unwrap();
    if g.is_empty() {
        return Ok(());
    }
    let rep = is_locally_maximal(&ambient, &g, 6).unwrap();
    prop_assert!(rep.locally_maximal, "{:?}", rep.schedule);
    Ok(())
}

pub fn periodic_orbit_locally_maximal(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let ambient = random_shift(&mut r);
    let pts = ambient.periodic_points(6);
    let p = &pts[r.gen_range(0..pts.len())];
    let q = p.period().unwrap() as i64;
    let g = Sublanguage::periodic_orbit(ambient.alphabet_size(), &p.window(0, q - 1)).unwrap();
    prop_assert!(is_locally_maximal(&ambient, &g, 8).unwrap().locally_maximal);
    Ok(())
}

pub fn horizon_antitone((seed, k1, k2): (u64, u32, u32)) -> Outcome {
    let mut r = rng(seed);
    let shift = random_shift(&mut r);
    let (small, large) = (0.5f64.powi(k1.max(k2) as i32), 0.5f64.powi(k1.min(k2) as i32));
    prop_assert!(
        shift.uniform_expansivity_horizon(0.5, small).unwrap() >= shift.uniform_expansivity_horizon(0.5, large).unwrap()
    );
    Ok(())
}

pub fn recoding_keeps_entropy((seed, k): (u64, usize)) -> Outcome {
    let mut r = rng(seed);
    let shift = random_shift(&mut r);
    let blocks = shift.higher_block(k).unwrap();
    prop_assert!((sft_entropy(&shift).unwrap() - sft_entropy(&blocks).unwrap()).abs() < 1e-9);
    Ok(())
}

fn run<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> Outcome) -> std::result::Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut cfg = Config::with_cases(cases);
    cfg.failure_persistence = None;
    TestRunner::new(cfg).run(&s, f).map_err(|e| e.to_string())
}

/// Runs one named suite with `cases` random cases.
pub fn run_suite(name: &str, cases: u32) -> std::result::Result<(), String> {
    let seed = any::<u64>();
    match name {
        "ball monotonicity" => run(cases, (seed, 0.0f64..1.0, 0.0f64..1.0), ball_monotone),
        "core monotonicity" => run(cases, (seed, 0.0f64..0.6), core_monotone),
        "accumulation monotonicity" => run(cases, (seed, 0.001f64..1.0, 0.001f64..1.0), accumulation_monotone),
        "sensitive points accumulate" => run(cases, (seed, 0.01f64..1.0), sensitive_in_accumulation),
        "Sen_a antitone in a" => run(cases, (seed, 0.01f64..1.0, 0.01f64..1.0), sensitivity_antitone),
        "s_n antitone in r" => run(cases, (seed, 1usize..6, 1u32..6, 1u32..6), separated_antitone_in_r),
        "s_n monotone in K" => run(cases, seed, separated_monotone_in_k),
        "shadowing soundness" => run(cases, (seed, 2u32..5, 2usize..12), shadowing_sound),
        "sub-SFTs locally maximal" => run(cases, (seed, 2usize..4), sub_sft_locally_maximal),
        "periodic orbits locally maximal" => run(cases, seed, periodic_orbit_locally_maximal),
        "expansivity horizon antitone" => run(cases, (seed, 1u32..6, 1u32..6), horizon_antitone),
        "block recoding keeps entropy" => run(cases, (seed, 2usize..4), recoding_keeps_entropy),
        other => Err(format!("no suite `{other}`")),
    }
}

pub const SUITES: [&str; 12] = [
    "ball monotonicity",
    "core monotonicity",
    "accumulation monotonicity",
    "sensitive points accumulate",
    "Sen_a antitone in a",
    "s_n antitone in r",
    "s_n monotone in K",
    "shadowing soundness",
    "sub-SFTs locally maximal",
    "periodic orbits locally maximal",
    "expansivity horizon antitone",
    "block recoding keeps entropy",
];
