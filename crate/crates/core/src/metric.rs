//! Distance conventions shared by every module.
//!
//! Distances are `f64`. Values produced by our own constructors are dyadic
//! rationals (exact in binary floating point) or planar Euclidean lengths;
//! every comparison goes through [`Tolerance`].

use serde::{Deserialize, Serialize};

/// Default comparison slack, 2^-40.
pub const DEFAULT_TOLERANCE: f64 = 9.094947017729282e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(DEFAULT_TOLERANCE)
    }
}

impl Tolerance {
    /// `a <= b` up to slack.
    #[inline]
    pub fn le(self, a: f64, b: f64) -> bool {
        a <= b + self.0
    }

    /// `a > b` beyond slack.
    #[inline]
    pub fn gt(self, a: f64, b: f64) -> bool {
        a > b + self.0
    }

    #[inline]
    pub fn eq(self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.0
    }

    #[inline]
    pub fn is_zero(self, a: f64) -> bool {
        a.abs() <= self.0
    }
}

/// 2^-k for k >= 0.
#[inline]
pub fn dyadic(k: u32) -> f64 {
    (0.5f64).powi(k as i32)
}

/// Least k >= 0 with 2^-k <= r. `None` for r <= 0.
pub fn dyadic_exponent_at_most(r: f64) -> Option<u32> {
    if r <= 0.0 || r.is_nan() {
        return None;
    }
    let mut k = 0u32;
    while dyadic(k) > r {
        k += 1;
        if k > 1074 {
            return None;
        }
    }
    Some(k)
}

/// Smallest dyadic 2^-k (k >= 0) that is >= d, for 0 < d <= 1. Values above
/// 1 round up to the next power of two.
pub fn dyadic_round_up(d: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    let mut v = 1.0f64;
    while v < d {
        v *= 2.0;
    }
    while v / 2.0 >= d {
        v /= 2.0;
    }
    v
}

/// Dyadic ladder `start, start/2, ...` down to (and including the first value
/// at or below) `floor`.
pub fn dyadic_ladder(start: f64, floor: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if start <= 0.0 {
        return out;
    }
    let mut v = start;
    loop {
        out.push(v);
        if v <= floor || out.len() > 64 {
            break;
        }
        v /= 2.0;
    }
    out
}

/// Parse a decimal or `a/b` fraction string, as used on the command line.
pub fn parse_distance(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().ok()?;
        let b: f64 = b.trim().parse().ok()?;
        if b == 0.0 {
            return None;
        }
        return Some(a / b);
    }
    if let Some(rest) = s.strip_prefix("2^") {
        let e: i32 = rest.trim_start_matches('(').trim_end_matches(')').parse().ok()?;
        return Some(2f64.powi(e));
    }
    s.parse().ok()
}
