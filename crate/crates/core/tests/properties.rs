mod common;

use common::props::run_suite;
use topodyn::symbolic::SubshiftSystem;

const CASES: u32 = 128;

fn check(name: &str) {
    if let Err(e) = run_suite(name, CASES) {
        panic!("{name}: {e}");
    }
}

#[test]
fn ball_monotonicity() {
    check("ball monotonicity");
}

#[test]
fn core_monotonicity() {
    check("core monotonicity");
}

#[test]
fn accumulation_monotonicity() {
    check("accumulation monotonicity");
}

#[test]
fn sensitive_points_accumulate() {
    check("sensitive points accumulate");
}

#[test]
fn sensitivity_antitone() {
    check("Sen_a antitone in a");
}

#[test]
fn separated_antitone_in_r() {
    check("s_n antitone in r");
}

#[test]
fn separated_monotone_in_k() {
    check("s_n monotone in K");
}

#[test]
fn shadowing_soundness() {
    check("shadowing soundness");
}

#[test]
fn sub_sfts_locally_maximal() {
    check("sub-SFTs locally maximal");
}

#[test]
fn periodic_orbits_locally_maximal() {
    check("periodic orbits locally maximal");
}

#[test]
fn expansivity_horizon_antitone() {
    check("expansivity horizon antitone");
}

#[test]
fn block_recoding_keeps_entropy() {
    check("block recoding keeps entropy");
}

#[test]
fn unknown_suite_is_reported() {
    assert!(run_suite("nothing", 1).is_err());
}

#[test]
fn shift_metric_separates_by_the_disagreement_index() {
    let full = SubshiftSystem::full(3);
    let pts = full.periodic_points(3);
    for p in &pts {
        for q in &pts {
            if p == q {
                continue;
            }
            let k = p.first_disagreement(q).unwrap() as i64;
            let sep = (-k..=k).any(|i| full.shift_metric(&p.shifted(i), &q.shifted(i)).unwrap() > 0.5);
            assert!(sep, "{p} {q}");
        }
    }
}
