//! Local maximality of sub-subshifts, decided on languages.
//!
//! For `r` with `2^-K <= r < 2^-(K-1)` the set `∩_i σ^i(B_r(G))` is the SFT
//! of ambient sequences whose `(2K-1)`-windows all occur in `G`.

use serde::{Deserialize, Serialize};

use super::language::Sublanguage;
use super::point::Symbol;
use super::shift::SubshiftSystem;
use crate::error::{invalid, DynError, Result};
use crate::metric::{dyadic, dyadic_exponent_at_most};

/// `∩_{i} σ^i(B_r(G))` inside `ambient`, as a language.
pub fn maximal_invariant_neighbourhood(
    ambient: &SubshiftSystem,
    g: &Sublanguage,
    r: f64,
) -> Result<Sublanguage> {
    check_inside(ambient, g)?;
    if !(r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    let k = dyadic_exponent_at_most(r).expect("r > 0") as usize;
    let m = ambient.alphabet_size();
    if k == 0 {
        return Ok(ambient.language());
    }
    let len = 2 * k - 1;
    if len >= 2 {
        let words: Vec<Vec<Symbol>> = g.words(len).into_iter().collect();
        return Sublanguage::from_window_words(m, len, &words);
    }
    // single-symbol windows: ambient transitions between symbols of G
    let syms: Vec<Symbol> = g.words(1).into_iter().map(|w| w[0]).collect();
    let words: Vec<Vec<Symbol>> = ambient
        .transition_pairs()
        .into_iter()
        .filter(|(a, b)| syms.contains(a) && syms.contains(b))
        .map(|(a, b)| vec![a, b])
        .collect();
    Sublanguage::from_window_words(m, 2, &words)
}

pub(crate) fn check_inside(ambient: &SubshiftSystem, g: &Sublanguage) -> Result<()> {
    if g.alphabet_size() != ambient.alphabet_size() {
        return Err(DynError::AlphabetMismatch(g.alphabet_size(), ambient.alphabet_size()));
    }
    if g.is_empty() {
        return Err(DynError::EmptySubshift);
    }
    if !g.is_sublanguage_of(&ambient.language()) {
        return Err(invalid("sub-subshift is not contained in the ambient subshift"));
    }
    Ok(())
}

/// `G = ∩_i σ^i(B_r(G))`, decided exactly.
pub fn is_locally_maximal_at(ambient: &SubshiftSystem, g: &Sublanguage, r: f64) -> Result<bool> {
    let x = maximal_invariant_neighbourhood(ambient, g, r)?;
    Ok(x.is_sublanguage_of(g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalityReport {
    pub locally_maximal: bool,
    /// Largest radius of the schedule that works.
    pub witness_r: Option<f64>,
    /// `(r, G == Λ_r)` for every radius tried.
    pub schedule: Vec<(f64, bool)>,
}

/// Searches `r = 2^-1, ..., 2^-horizon` for a radius witnessing local
/// maximality.
pub fn is_locally_maximal(ambient: &SubshiftSystem, g: &Sublanguage, horizon: usize) -> Result<MaximalityReport> {
    if horizon == 0 {
        return Err(invalid("horizon must be at least 1"));
    }
    let mut schedule = Vec::new();
    let mut witness_r = None;
    for k in 1..=horizon as u32 {
        let r = dyadic(k);
        let ok = is_locally_maximal_at(ambient, g, r)?;
        schedule.push((r, ok));
        if ok {
            witness_r = Some(r);
            break;
        }
    }
    Ok(MaximalityReport { locally_maximal: witness_r.is_some(), witness_r, schedule })
}
