mod common;

use std::collections::BTreeMap;

use common::members;
use topodyn::chaos::sensitive_points;
use topodyn::generators::{cantor_fan, circle_accumulation, GeneratorSpec};
use topodyn::io::{parse_system_json, system_file};
use topodyn::symbolic::{SubshiftSystem, SymbolicPoint};
use topodyn::topology::build_ball;
use topodyn::Metric;

fn coords(m: &Metric) -> &[[f64; 2]] {
    match m {
        Metric::Euclidean(p) => p,
        _ => panic!("planar generator expected"),
    }
}

#[test]
fn fibers_are_conjugate_to_the_truncated_shift() {
    let (n, p) = (4, 3);
    let g = cantor_fan(n, p).unwrap();
    let codes = SubshiftSystem::full(2).periodic_points(p);
    for fiber in 2..=n {
        let part = g.part(&format!("fiber {fiber}")).unwrap();
        assert!(g.system.is_invariant(part));
        assert_eq!(part.len(), codes.len());
        for x in part.iter() {
            let code: SymbolicPoint = g.system.label(x).split_once(':').unwrap().1.parse().unwrap();
            // orbit of x under f, read back through labels, against the shift orbit of its code
            let fx: Vec<String> = g.system.orbit(x, 2 * p).iter().map(|&y| g.system.label(y)).collect();
            let sx: Vec<String> = (0..2 * p as i64).map(|i| format!("{fiber}:{}", code.shifted(i))).collect();
            assert_eq!(fx, sx);
        }
    }
}

#[test]
fn fiber_points_sit_on_the_vertical_line_through_one_over_n() {
    let g = cantor_fan(3, 2).unwrap();
    let pts = coords(g.system.metric());
    assert_eq!(pts[0], [0.0, 0.0]);
    for fiber in 2..=3 {
        for x in g.part(&format!("fiber {fiber}")).unwrap().iter() {
            assert_eq!(pts[x][0], 1.0 / fiber as f64);
            // a Cantor point: ternary digits 0 or 2 only
            let mut y = pts[x][1] * fiber as f64;
            for _ in 0..12 {
                y *= 3.0;
                let d = y.floor();
                assert!(d == 0.0 || d == 2.0 || (y - 3.0).abs() < 1e-6, "{y}");
                y -= d;
            }
        }
    }
}

#[test]
fn lambda_is_invariant_and_not_sensitive() {
    for (n, p) in [(2, 1), (3, 2), (4, 3)] {
        let g = cantor_fan(n, p).unwrap();
        let lambda = g.lambda.as_ref().unwrap();
        assert!(g.system.is_invariant(lambda));
        let (sub, _) = g.system.restrict(lambda).unwrap();
        for a in [0.5, 0.1, 0.01] {
            assert!(sensitive_points(&sub, &sub.all(), a).unwrap().sensitive.is_empty());
        }
    }
}

#[test]
fn ball_of_radius_half_is_the_points_of_norm_at_most_half() {
    let g = cantor_fan(4, 3).unwrap();
    let pts = coords(g.system.metric());
    let ball = build_ball(&g.system, g.lambda.as_ref().unwrap(), 0.5).unwrap();
    let oracle: Vec<usize> = (0..pts.len()).filter(|&i| pts[i][0].hypot(pts[i][1]) <= 0.5 + 1e-12).collect();
    assert_eq!(members(&ball), oracle.iter().copied().collect());
    for fiber in 3..=4 {
        assert!(g.part(&format!("fiber {fiber}")).unwrap().is_subset(&ball));
    }
    let f2 = g.part("fiber 2").unwrap();
    let inside = f2.iter().filter(|&x| ball.contains(x)).count();
    assert!(inside > 0 && inside < f2.len());
}

#[test]
fn circle_orbits_have_length_two_to_the_n_minus_one() {
    let g = circle_accumulation(6).unwrap();
    for j in 1..=6 {
        let layer = g.part(&format!("layer {j}")).unwrap();
        assert_eq!(layer.len(), 1 << (j - 1));
        let z0 = layer.iter().next().unwrap();
        assert_eq!(g.system.label(z0), format!("z[{j},0]"));
        // walk the orbit by hand
        let mut y = g.system.apply(z0);
        let mut steps = 1;
        while y != z0 {
            y = g.system.apply(y);
            steps += 1;
        }
        assert_eq!(steps, 1 << (j - 1));
        let r = coords(g.system.metric())[z0];
        assert!((r[0] - (1.0 - 1.0 / j as f64)).abs() < 1e-15 && r[1] == 0.0);
    }
    let circle = g.part("circle").unwrap();
    assert_eq!(circle.len(), 32);
    assert!(circle.iter().all(|x| g.system.apply(x) == x));
    assert!((0..g.system.len()).all(|x| g.system.period_of(x).is_some()));
}

#[test]
fn generators_are_deterministic() {
    for spec in [GeneratorSpec::CantorFan { n: 4, p: 3 }, GeneratorSpec::CircleAccumulation { n: 5 }] {
        let a = spec.generate().unwrap();
        let b = spec.generate().unwrap();
        let ser = |g: &topodyn::generators::Generated| {
            serde_json::to_string(&system_file(&g.system, &BTreeMap::new())).unwrap()
        };
        assert_eq!(ser(&a), ser(&b));
        assert_eq!(a.system.id(), b.system.id());
        // a serialized system reloads to the same map and metric
        let back = parse_system_json(&ser(&a)).unwrap();
        assert_eq!(back.system.map(), a.system.map());
        assert_eq!(back.system.metric(), a.system.metric());
    }
}

#[test]
fn generator_bounds() {
    assert!(cantor_fan(1, 3).is_err());
    assert!(cantor_fan(3, 0).is_err());
    assert!(circle_accumulation(1).is_err());
}
