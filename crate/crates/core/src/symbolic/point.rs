use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, DynError, Result};

pub type Symbol = u32;

/// An eventually periodic bi-infinite sequence.
///
/// Symbols at indices `< base` come from the left period word, `center`
/// occupies `[base, base + center.len())`, and the right period word repeats
/// from there on. The left word is laid out so that its last symbol sits at
/// index `base - 1`.
///
/// Values are always normalized: both period words are primitive, the center
/// is as short as possible, and purely periodic points have an empty center
/// with `base == 0`. Equality is therefore syntactic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymbolicPoint {
    left: Vec<Symbol>,
    center: Vec<Symbol>,
    right: Vec<Symbol>,
    base: i64,
}

fn primitive_root(w: &[Symbol]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&d| n % d == 0 && (d..n).all(|i| w[i] == w[i - d]))
        .unwrap_or(n)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl SymbolicPoint {
    pub fn new(left: Vec<Symbol>, center: Vec<Symbol>, right: Vec<Symbol>, base: i64) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(invalid("period words must be nonempty"));
        }
        let mut p = SymbolicPoint { left, center, right, base };
        p.normalize();
        Ok(p)
    }

    /// The periodic point `...www.www...` with `w[0]` at index 0.
    pub fn periodic(word: &[Symbol]) -> Result<Self> {
        Self::new(word.to_vec(), Vec::new(), word.to_vec(), 0)
    }

    /// Point with `word[j]` at index `start + j` on a background of `fill`.
    pub fn with_block(fill: Symbol, start: i64, word: &[Symbol]) -> Self {
        Self::new(vec![fill], word.to_vec(), vec![fill], start).expect("nonempty periods")
    }

    pub fn left_period(&self) -> &[Symbol] {
        &self.left
    }

    pub fn center(&self) -> &[Symbol] {
        &self.center
    }

    pub fn right_period(&self) -> &[Symbol] {
        &self.right
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    /// One past the last center index.
    pub fn end(&self) -> i64 {
        self.base + self.center.len() as i64
    }

    pub fn is_periodic(&self) -> bool {
        self.center.is_empty() && self.left == self.right
    }

    /// Least period if the point is periodic under the shift.
    pub fn period(&self) -> Option<usize> {
        self.is_periodic().then(|| self.right.len())
    }

    pub fn max_symbol(&self) -> Symbol {
        self.left
            .iter()
            .chain(&self.center)
            .chain(&self.right)
            .copied()
            .max()
            .unwrap_or(0)
    }

    #[inline]
    pub fn symbol_at(&self, i: i64) -> Symbol {
        if i >= self.base {
            let off = i - self.base;
            let c = self.center.len() as i64;
            if off < c {
                self.center[off as usize]
            } else {
                let p = self.right.len() as i64;
                self.right[((off - c) % p) as usize]
            }
        } else {
            let q = self.left.len() as i64;
            let j = (self.base - 1 - i) % q;
            self.left[(q - 1 - j) as usize]
        }
    }

    /// Symbols on `[lo, hi]` inclusive.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Symbol> {
        (lo..=hi).map(|i| self.symbol_at(i)).collect()
    }

    /// `sigma^k(self)`, where `(sigma x)_i = x_{i+1}`.
    pub fn shifted(&self, k: i64) -> Self {
        let mut p = self.clone();
        p.base -= k;
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        let d = primitive_root(&self.right);
        self.right.truncate(d);
        let d = primitive_root(&self.left);
        self.left.truncate(d);

        // absorb the center into the right period
        while let Some(&c) = self.center.last() {
            if c != *self.right.last().unwrap() {
                break;
            }
            self.center.pop();
            self.right.rotate_right(1);
        }
        if self.center.is_empty() {
            if self.left == self.right {
                let p = self.right.len() as i64;
                let shift = self.base.rem_euclid(p) as usize;
                // x_i = right[(i - base) mod p]
                self.right.rotate_right(shift);
                self.left = self.right.clone();
                self.base = 0;
                return;
            }
            // right tail may extend further left into the left tail
            let mut guard = 0usize;
            while self.left.last() == self.right.last() {
                self.left.rotate_right(1);
                self.right.rotate_right(1);
                self.base -= 1;
                guard += 1;
                debug_assert!(guard <= self.left.len() * self.right.len() + 1);
                if guard > self.left.len() * self.right.len() + 1 {
                    break;
                }
            }
            return;
        }
        while !self.center.is_empty() && self.center[0] == self.left[0] {
            let c = self.center.remove(0);
            self.left.rotate_left(1);
            debug_assert_eq!(*self.left.last().unwrap(), c);
            self.base += 1;
        }
    }

    /// Least `|i|` at which the two sequences differ, `None` if equal.
    pub fn first_disagreement(&self, other: &Self) -> Option<u64> {
        if self == other {
            return None;
        }
        let right_span = lcm(self.right.len(), other.right.len()) as i64;
        let left_span = lcm(self.left.len(), other.left.len()) as i64;
        let hi = self.end().max(other.end()).max(0) + right_span;
        let lo = self.base.min(other.base).min(0) - left_span;
        let reach = hi.max(-lo);
        (0..=reach)
            .find(|&k| self.symbol_at(k) != other.symbol_at(k) || self.symbol_at(-k) != other.symbol_at(-k))
            .map(|k| k as u64)
    }

    fn part_to_string(w: &[Symbol], wide: bool) -> String {
        if wide {
            w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        } else {
            w.iter().map(|&s| std::char::from_digit(s, 36).unwrap()).collect()
        }
    }
}

impl Ord for SymbolicPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.left, &self.center, &self.right, self.base).cmp(&(&other.left, &other.center, &other.right, other.base))
    }
}

impl PartialOrd for SymbolicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SymbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.max_symbol() >= 36;
        write!(
            f,
            "({}).{}.({})",
            Self::part_to_string(&self.left, wide),
            Self::part_to_string(&self.center, wide),
            Self::part_to_string(&self.right, wide)
        )?;
        if self.base != 0 {
            write!(f, "@{}", self.base)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SymbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_part(s: &str) -> Result<Vec<Symbol>> {
    let s = s.trim();
    if s.contains(',') {
        s.split(',')
            .map(|t| t.trim().parse::<Symbol>().map_err(|_| invalid(format!("bad symbol `{t}`"))))
            .collect()
    } else {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_digit(36).ok_or_else(|| invalid(format!("bad symbol `{c}`"))))
            .collect()
    }
}

impl FromStr for SymbolicPoint {
    type Err = DynError;

    /// Parses `(left).center.(right)` with an optional `@base` suffix;
    /// `(w)` alone is the periodic point `w^inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, base) = match s.rsplit_once('@') {
            Some((b, k)) => (b, k.trim().parse::<i64>().map_err(|_| invalid("bad base index"))?),
            None => (s, 0),
        };
        let open = body.strip_prefix('(').ok_or_else(|| invalid("expected `(`"))?;
        let (left, rest) = open.split_once(')').ok_or_else(|| invalid("expected `)`"))?;
        if rest.trim().is_empty() {
            let w = parse_part(left)?;
            return SymbolicPoint::periodic(&w).map(|x| x.shifted(-base));
        }
        let rest = rest.trim().strip_prefix('.').ok_or_else(|| invalid("expected `.`"))?;
        let (center, rest) = rest.split_once('(').ok_or_else(|| invalid("expected `(`"))?;
        let center = center.trim();
        let center = match center.strip_suffix('.') {
            Some(c) => c,
            None if center.is_empty() => center,
            None => return Err(invalid("expected `.`")),
        };
        let right = rest.trim().strip_suffix(')').ok_or_else(|| invalid("expected `)`"))?;
        SymbolicPoint::new(parse_part(left)?, parse_part(center)?, parse_part(right)?, base)
    }
}

impl Serialize for SymbolicPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SymbolicPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
