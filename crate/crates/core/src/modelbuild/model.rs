//! Clopen partitions of a symbolic `Λ` and the SFT envelope `Γ_c` built
//! from its itinerary windows.

use serde::{Deserialize, Serialize};

use crate::entropy::spectral_radius;
use crate::error::{invalid, DynError, Result};
use crate::metric::{dyadic, dyadic_exponent_at_most};
use crate::symbolic::maximal::check_inside;
use crate::symbolic::{is_locally_maximal, MaximalityReport, Sublanguage, SubshiftSystem, Symbol, SymbolicPoint};

const MAX_RADIUS: usize = 24;
/// Longest period of `Ξ` materialized for the conjugacy check.
pub const CONJUGACY_PERIOD: usize = 10;
const MAX_SAMPLES: usize = 4096;
const N_SEARCH: usize = 8;

/// Cells `A_k`: the central cylinders `{x in Λ : x_{-R..=R} = word_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub e: f64,
    pub radius: usize,
    /// Sorted central words; the cell index is the position here.
    pub cells: Vec<Vec<Symbol>>,
    /// Upper bound `2^-(R+1)` on every cell diameter.
    pub diameter: f64,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_of(&self, word: &[Symbol]) -> Option<usize> {
        self.cells.binary_search_by(|c| c.as_slice().cmp(word)).ok()
    }

    fn center(&self, k: usize) -> Symbol {
        self.cells[k][self.radius]
    }

    /// Checks the thickened cells `B_c(A_k)`; returns the diameter bound.
    ///
    /// Points of `B_c(A_k)` agree with some point of `A_k` on `|i| <= K-1`
    /// (`c` in `[2^-K, 2^-(K-1))`), so two thickened cells meet exactly when
    /// their words share the central `(2K-1)`-subword.
    pub fn thickened_diameter(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(invalid(format!("c must be positive, got {c}")));
        }
        let k = dyadic_exponent_at_most(c).expect("c > 0") as usize;
        if k == 0 {
            return if self.cells.len() == 1 { Ok(1.0) } else { Err(DynError::CellsOverlap(c)) };
        }
        let keep = (k - 1).min(self.radius);
        let cut = self.radius - keep;
        let mut cores: Vec<&[Symbol]> = self.cells.iter().map(|w| &w[cut..w.len() - cut]).collect();
        cores.sort();
        cores.dedup();
        if cores.len() != self.cells.len() {
            return Err(DynError::CellsOverlap(c));
        }
        Ok(dyadic(keep as u32 + 1))
    }

    /// Largest dyadic `c` with disjoint thickened cells of diameter `<= e`.
    pub fn default_c(&self) -> f64 {
        (1..=MAX_RADIUS as u32 + 2)
            .map(dyadic)
            .find(|&c| self.thickened_diameter(c).is_ok_and(|d| d <= self.e))
            .expect("c = 2^-(R+1) always works")
    }
}

/// Central cylinders of the least radius `R` with `2^-(R+1) < e`.
pub fn clopen_partition(ambient: &SubshiftSystem, lambda: &Sublanguage, e: f64) -> Result<Partition> {
    check_inside(ambient, lambda)?;
    if !(e > 0.0) {
        return Err(invalid(format!("e must be positive, got {e}")));
    }
    let radius = (0..=MAX_RADIUS).find(|&r| dyadic(r as u32 + 1) < e).ok_or(DynError::ScaleTooFine(e))?;
    let cells: Vec<Vec<Symbol>> = lambda.words(2 * radius + 1).into_iter().collect();
    Ok(Partition { e, radius, cells, diameter: dyadic(radius as u32 + 1) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyCheck {
    pub max_period: usize,
    pub samples: usize,
    /// `h(σ s) = σ h(s)` on every sample.
    pub intertwines: bool,
    pub injective: bool,
    /// `σ^j h(s) ∈ B_c(A_{s_j})` on every sample and every `j`.
    pub in_cells: bool,
    /// A few `(s, h(s))` pairs for the record.
    pub examples: Vec<(SymbolicPoint, SymbolicPoint)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SftModel {
    pub partition: Partition,
    pub c: f64,
    pub thickened_diameter: f64,
    pub n: usize,
    /// `(n, accepted)` for every window tried.
    pub n_search: Vec<(usize, bool)>,
    /// `W`, sorted, over the cell alphabet.
    pub words: Vec<Vec<Symbol>>,
    pub itinerary: Sublanguage,
    pub xi: Sublanguage,
    pub gamma: Sublanguage,
    pub itinerary_in_xi: bool,
    pub lambda_in_gamma: bool,
    pub gamma_in_ball: bool,
    pub conjugacy: ConjugacyCheck,
    pub entropy: f64,
    pub maximality: MaximalityReport,
}

impl SftModel {
    /// Every invariant of the construction held.
    pub fn sound(&self) -> bool {
        self.itinerary_in_xi
            && self.lambda_in_gamma
            && self.gamma_in_ball
            && self.conjugacy.intertwines
            && self.conjugacy.injective
            && self.conjugacy.in_cells
    }
}

fn map_point(x: &SymbolicPoint, f: impl Fn(Symbol) -> Symbol) -> SymbolicPoint {
    let m = |v: &[Symbol]| v.iter().map(|&s| f(s)).collect::<Vec<_>>();
    SymbolicPoint::new(m(x.left_period()), m(x.center()), m(x.right_period()), x.base()).expect("periods kept")
}

/// `σ^j y ∈ B_c(A_k)` where `c` lies in `[2^-K, 2^-(K-1))`.
fn in_cell(lambda: &Sublanguage, part: &Partition, y: &SymbolicPoint, j: i64, k: usize, kexp: usize) -> bool {
    let r = part.radius;
    let rad = kexp.saturating_sub(1);
    let cell = &part.cells[k];
    if kexp == 0 {
        return true;
    }
    let win = y.window(j - rad as i64, j + rad as i64);
    if rad >= r {
        win[rad - r..=rad + r] == cell[..] && lambda.contains_word(&win)
    } else {
        cell[r - rad..=r + rad] == win[..]
    }
}

fn check_conjugacy(lambda: &Sublanguage, part: &Partition, xi: &Sublanguage, kexp: usize) -> ConjugacyCheck {
    let h = |s: &SymbolicPoint| map_point(s, |k| part.center(k as usize));
    let mut samples = Vec::new();
    for p in 1..=CONJUGACY_PERIOD {
        let batch = xi.periodic_points(p);
        if samples.len() + batch.len() > MAX_SAMPLES && !samples.is_empty() {
            break;
        }
        samples = batch;
    }
    let mut intertwines = true;
    let mut in_cells = true;
    let mut images = Vec::with_capacity(samples.len());
    let mut max_period = 0;
    for s in &samples {
        let y = h(s);
        intertwines &= h(&s.shifted(1)) == y.shifted(1);
        let q = s.period().expect("periodic") as i64;
        max_period = max_period.max(q as usize);
        in_cells &= (0..q).all(|j| in_cell(lambda, part, &y, j, s.symbol_at(j) as usize, kexp));
        images.push(y);
    }
    let mut sorted = images.clone();
    sorted.sort();
    sorted.dedup();
    ConjugacyCheck {
        max_period,
        samples: samples.len(),
        intertwines,
        injective: sorted.len() == images.len(),
        in_cells,
        examples: samples.iter().cloned().zip(images).take(8).collect(),
    }
}

fn entropy_of(lang: &Sublanguage) -> f64 {
    let rho = spectral_radius(&lang.determinized_adjacency());
    if rho > 0.0 {
        rho.ln().max(0.0)
    } else {
        0.0
    }
}

/// Builds `W`, `Ξ` and `Γ_c = h(Ξ)`. The window starts at `n` (or the
/// uniform expansivity horizon) and grows until the shadows land in their
/// cells and `Γ_c ⊆ B_c(Λ)`.
pub fn build_sft_model(
    ambient: &SubshiftSystem,
    lambda: &Sublanguage,
    partition: &Partition,
    n: Option<usize>,
    c: Option<f64>,
) -> Result<SftModel> {
    check_inside(ambient, lambda)?;
    if partition.is_empty() {
        return Err(DynError::EmptySubshift);
    }
    let c = c.unwrap_or_else(|| partition.default_c());
    let thickened_diameter = partition.thickened_diameter(c)?;
    if thickened_diameter > partition.e {
        return Err(invalid(format!(
            "thickened cells at c={c} have diameter {thickened_diameter} > e={}",
            partition.e
        )));
    }
    let kexp = dyadic_exponent_at_most(c).expect("c > 0") as usize;
    let delta = c.min(0.25);
    let start = match n {
        Some(n) if n >= 1 => n,
        Some(_) => return Err(invalid("window n must be at least 1")),
        None => ambient
            .uniform_expansivity_horizon(ambient.expansivity_constant().constant, delta)?
            .max(1),
    };
    let m = partition.len();
    let r = partition.radius;
    let itinerary = lambda.block_image(m, r, |w| partition.cell_of(w).map(|k| k as Symbol));
    let lower_ball = kexp.max(1) * 2 - 1;
    let ball_words = lambda.words(lower_ball);
    let mut n_search = Vec::new();
    for n in start..start + N_SEARCH {
        let words: Vec<Vec<Symbol>> = itinerary.words(2 * n + 1).into_iter().collect();
        let xi = Sublanguage::from_window_words(m, 2 * n + 1, &words)?;
        let gamma = xi.relabel(ambient.alphabet_size(), |k| partition.center(k as usize));
        let gamma_in_ball = gamma.words(lower_ball).is_subset(&ball_words);
        let conjugacy = check_conjugacy(lambda, partition, &xi, kexp);
        let ok = gamma_in_ball && conjugacy.in_cells;
        n_search.push((n, ok));
        if !ok {
            continue;
        }
        let horizon = kexp + n + r + 4;
        let maximality = is_locally_maximal(ambient, &gamma, horizon)?;
        return Ok(SftModel {
            partition: partition.clone(),
            c,
            thickened_diameter,
            n,
            n_search,
            itinerary_in_xi: itinerary.is_sublanguage_of(&xi),
            lambda_in_gamma: lambda.is_sublanguage_of(&gamma),
            gamma_in_ball,
            entropy: entropy_of(&gamma),
            words,
            itinerary,
            xi,
            gamma,
            conjugacy,
            maximality,
        });
    }
    Err(DynError::ShadowingFailed {
        eps: c,
        detail: format!("no window n in {start}..{} puts every shadow in its cell", start + N_SEARCH),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_cells() {
        let full = SubshiftSystem::full(2);
        let p = clopen_partition(&full, &full.language(), 0.75).unwrap();
        assert_eq!(p.radius, 0);
        assert_eq!(p.cells, vec![vec![0], vec![1]]);
        assert_eq!(p.default_c(), 0.5);
        assert!(matches!(p.thickened_diameter(1.0), Err(DynError::CellsOverlap(_))));
        let fixed = Sublanguage::periodic_orbit(2, &[0]).unwrap();
        assert_eq!(clopen_partition(&full, &fixed, 0.01).unwrap().len(), 1);
    }

    #[test]
    fn period_two_model() {
        let full = SubshiftSystem::full(2);
        let lam = Sublanguage::periodic_orbit(2, &[0, 1]).unwrap();
        let p = clopen_partition(&full, &lam, 0.75).unwrap();
        let m = build_sft_model(&full, &lam, &p, Some(1), None).unwrap();
        assert_eq!(m.words, vec![vec![0, 1, 0], vec![1, 0, 1]]);
        assert!(m.gamma.same_language(&lam));
        assert!(m.sound());
        assert_eq!(m.entropy, 0.0);
        assert!(m.maximality.locally_maximal);
    }

    #[test]
    fn golden_mean_model() {
        let full = SubshiftSystem::full(2);
        let gm = SubshiftSystem::golden_mean().language();
        let p = clopen_partition(&full, &gm, 0.75).unwrap();
        let m = build_sft_model(&full, &gm, &p, Some(1), None).unwrap();
        assert_eq!(m.words.len(), 5);
        assert!(m.words.iter().all(|w| !w.windows(2).any(|x| x == [1, 1])));
        assert!(m.gamma.same_language(&gm));
        assert!(m.sound());
        assert!((m.entropy - 0.481211825).abs() < 1e-6);
    }

    #[test]
    fn finer_c_needs_larger_windows() {
        let full = SubshiftSystem::full(2);
        let lam = full.language();
        let p = clopen_partition(&full, &lam, 0.75).unwrap();
        let m = build_sft_model(&full, &lam, &p, None, Some(0.125)).unwrap();
        assert_eq!(m.words.len(), 1 << (2 * m.n + 1));
        assert!(m.sound());
    }
}
