//! The Cantor fan and the circle with accumulating periodic orbits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::symbolic::{SubshiftSystem, SymbolicPoint};
use crate::system::{FiniteMetricSystem, Metric, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum GeneratorSpec {
    /// Fibers `2..=n`, each holding the binary points of period `<= p`.
    CantorFan { n: usize, p: usize },
    /// Circle samples plus the orbits `z_{j,k}`, `1 <= j <= n`.
    CircleAccumulation { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub spec: GeneratorSpec,
    pub system: FiniteMetricSystem,
    /// Distinguished invariant set, when the example has one.
    pub lambda: Option<Subset>,
    /// Named pieces of the state set (fibers, layers).
    pub parts: Vec<(String, Subset)>,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Generated> {
        match *self {
            GeneratorSpec::CantorFan { n, p } => cantor_fan(n, p),
            GeneratorSpec::CircleAccumulation { n } => circle_accumulation(n),
        }
    }
}

/// Index order of the ternary digits: `0, 1, -1, 2, -2, ...`.
fn digit_index(k: usize) -> i64 {
    if k == 0 {
        0
    } else if k % 2 == 1 {
        (k as i64 + 1) / 2
    } else {
        -(k as i64 / 2)
    }
}

/// The point of the Cantor set coding the periodic `w`, as an exact fraction
/// `(num, den)`: ternary digits `2 w_j` read in the order of [`digit_index`].
/// After the first digit the pairs `(w_j, w_-j)` repeat with the period of
/// `w`, so the expansion is purely periodic from the second digit on.
pub fn cantor_fraction(w: &SymbolicPoint) -> Result<(u64, u64)> {
    let q = w.period().ok_or_else(|| invalid(format!("{w} is not periodic")))?;
    if q > 16 {
        return Err(invalid(format!("period {q} too long for an exact coordinate")));
    }
    let digit = |k: usize| 2 * w.symbol_at(digit_index(k)) as u64;
    let block = 2 * q;
    let t = 3u64.pow(block as u32);
    let s = (0..block).fold(0u64, |acc, i| acc * 3 + digit(1 + i));
    let (num, den) = (digit(0) * (t - 1) + s, 3 * (t - 1));
    let g = gcd(num, den);
    Ok((num / g, den / g))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

pub fn cantor_coordinate(w: &SymbolicPoint) -> f64 {
    let (n, d) = cantor_fraction(w).expect("fiber codes are periodic");
    n as f64 / d as f64
}

pub fn cantor_fan(n: usize, p: usize) -> Result<Generated> {
    if n < 2 || p < 1 {
        return Err(invalid(format!("cantor_fan needs N >= 2 and P >= 1, got N={n}, P={p}")));
    }
    let codes = SubshiftSystem::full(2).periodic_points(p);
    let m = codes.len();
    let mut coords = vec![[0.0, 0.0]];
    let mut map = vec![0];
    let mut labels = vec!["origin".to_string()];
    let mut parts = Vec::new();
    for fiber in 2..=n {
        let offset = coords.len();
        let scale = 1.0 / fiber as f64;
        for w in &codes {
            coords.push([scale, scale * cantor_coordinate(w)]);
            let image = codes.binary_search(&w.shifted(1)).expect("periodic points are shift-invariant");
            map.push(offset + image);
            labels.push(format!("{fiber}:{w}"));
        }
        parts.push((format!("fiber {fiber}"), (offset..offset + m).collect::<Vec<_>>()));
    }
    let system = FiniteMetricSystem::new(Metric::Euclidean(coords), map, Some(labels))?;
    let parts = parts
        .into_iter()
        .map(|(name, v)| Ok((name, system.subset(v)?)))
        .collect::<Result<Vec<_>>>()?;
    let lambda = Some(system.subset([0])?);
    Ok(Generated { spec: GeneratorSpec::CantorFan { n, p }, system, lambda, parts })
}

pub fn circle_accumulation(n: usize) -> Result<Generated> {
    if n < 2 {
        return Err(invalid(format!("circle_accumulation needs N >= 2, got {n}")));
    }
    let on_circle = |radius: f64, k: usize, count: usize| {
        let t = 2.0 * PI * k as f64 / count as f64;
        [radius * t.cos(), radius * t.sin()]
    };
    let samples = 1usize << (n - 1);
    let mut coords: Vec<[f64; 2]> = (0..samples).map(|k| on_circle(1.0, k, samples)).collect();
    let mut map: Vec<usize> = (0..samples).collect();
    let mut labels: Vec<String> = (0..samples).map(|k| format!("circle {k}/{samples}")).collect();
    let mut parts = vec![("circle".to_string(), (0..samples).collect::<Vec<_>>())];
    for j in 1..=n {
        let count = 1usize << (j - 1);
        let offset = coords.len();
        let radius = 1.0 - 1.0 / j as f64;
        for k in 0..count {
            coords.push(on_circle(radius, k, count));
            map.push(offset + (k + 1) % count);
            labels.push(format!("z[{j},{k}]"));
        }
        parts.push((format!("layer {j}"), (offset..offset + count).collect()));
    }
    let system = FiniteMetricSystem::new(Metric::Euclidean(coords), map, Some(labels))?;
    let parts = parts
        .into_iter()
        .map(|(name, v)| Ok((name, system.subset(v)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Generated { spec: GeneratorSpec::CircleAccumulation { n }, system, lambda: None, parts })
}

impl Generated {
    pub fn part(&self, name: &str) -> Option<&Subset> {
        self.parts.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}
