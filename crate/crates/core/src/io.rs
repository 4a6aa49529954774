//! File formats: system JSON, SFT text, DOT and CSV output.
//!
//! System file (JSON):
//!
//! ```text
//! { "states": 3,
//!   "labels": ["a", "b", "c"],                       optional
//!   "metric": { "table": [[], [1], ["1/2", 1]] }     lower-triangular rows
//!          or { "points": [[0, 0], [1, 0], [0, 1]] } planar Euclidean
//!          or { "generator": { "name": "cantor_fan", "n": 4, "p": 3 } },
//!   "map": [1, 2, 0],                                 omitted for generators
//!   "subsets": { "lambda": [0] } }                    optional
//! ```
//!
//! SFT file (text, `#` starts a comment):
//!
//! ```text
//! alphabet 2
//! 0 -> 0
//! 0 -> 1
//! 1 -> 0
//! words 3: 000 001 010 100 101
//! ```
//!
//! Transition lines are length-2 words and cannot be mixed with a `words`
//! line of another length. Words are digit strings, or comma-separated
//! symbols (`0,10,3`) when the alphabet exceeds 10.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::ChainDecomposition;
use crate::entropy::EntropyReport;
use crate::error::{invalid, DynError, Result};
use crate::generators::GeneratorSpec;
use crate::metric::parse_distance;
use crate::symbolic::{Sublanguage, SubshiftSystem, Symbol};
use crate::system::{FiniteMetricSystem, Metric, Subset};

/// A distance written as a number or as a decimal/fraction string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Distance {
    Number(f64),
    Text(String),
}

impl Distance {
    pub fn value(&self) -> Result<f64> {
        match self {
            Distance::Number(v) => Ok(*v),
            Distance::Text(s) => parse_distance(s).ok_or_else(|| invalid(format!("bad distance `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSpec {
    Table(Vec<Vec<Distance>>),
    Points(Vec<[f64; 2]>),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(default)]
    pub states: Option<usize>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub metric: MetricSpec,
    #[serde(default)]
    pub map: Option<Vec<usize>>,
    #[serde(default)]
    pub subsets: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSystem {
    pub system: FiniteMetricSystem,
    pub subsets: BTreeMap<String, Subset>,
    /// Named parts supplied by a generator.
    pub parts: Vec<(String, Subset)>,
}

impl LoadedSystem {
    /// The subset called `lambda`, if present.
    pub fn lambda(&self) -> Option<&Subset> {
        self.subsets.get("lambda")
    }
}

impl SystemFile {
    pub fn into_system(self) -> Result<LoadedSystem> {
        let (system, mut subsets, parts) = match self.metric {
            MetricSpec::Generator(g) => {
                let gen = g.generate()?;
                let mut subsets = BTreeMap::new();
                if let Some(l) = gen.lambda {
                    subsets.insert("lambda".to_string(), l);
                }
                (gen.system, subsets, gen.parts)
            }
            MetricSpec::Table(rows) => {
                let map = self.map.ok_or_else(|| invalid("`map` is required"))?;
                let n = rows.len();
                let mut full = vec![vec![0.0; n]; n];
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != i {
                        return Err(invalid(format!("table row {i} has {} entries, expected {i}", row.len())));
                    }
                    for (j, d) in row.iter().enumerate() {
                        let v = d.value()?;
                        full[i][j] = v;
                        full[j][i] = v;
                    }
                }
                let sys = FiniteMetricSystem::with_map(
                    Metric::Table(full.into_iter().flatten().collect()),
                    map,
                    self.labels.clone(),
                )?;
                (sys, BTreeMap::new(), Vec::new())
            }
            MetricSpec::Points(p) => {
                let map = self.map.ok_or_else(|| invalid("`map` is required"))?;
                let sys = FiniteMetricSystem::with_map(Metric::Euclidean(p), map, self.labels.clone())?;
                (sys, BTreeMap::new(), Vec::new())
            }
        };
        if let Some(n) = self.states {
            if n != system.len() {
                return Err(invalid(format!("`states` says {n} but the metric has {}", system.len())));
            }
        }
        for (name, members) in self.subsets {
            subsets.insert(name, system.subset(members)?);
        }
        Ok(LoadedSystem { system, subsets, parts })
    }
}

fn json_error(e: serde_json::Error) -> DynError {
    DynError::Parse { line: e.line(), msg: e.to_string() }
}

pub fn parse_system_json(text: &str) -> Result<LoadedSystem> {
    let file: SystemFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_system()
}

pub fn load_system(path: &Path) -> Result<LoadedSystem> {
    parse_system_json(&fs::read_to_string(path)?)
}

/// Serializes a finite system in the table form of the system file.
pub fn system_file(sys: &FiniteMetricSystem, subsets: &BTreeMap<String, Subset>) -> SystemFile {
    let metric = match sys.metric() {
        Metric::Euclidean(p) => MetricSpec::Points(p.clone()),
        _ => MetricSpec::Table(
            (0..sys.len())
                .map(|i| (0..i).map(|j| Distance::Number(sys.dist(i, j))).collect())
                .collect(),
        ),
    };
    SystemFile {
        states: Some(sys.len()),
        labels: sys.labels().map(<[String]>::to_vec),
        metric,
        map: Some(sys.map().to_vec()),
        subsets: subsets.iter().map(|(k, v)| (k.clone(), v.iter().collect())).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftText {
    pub alphabet: usize,
    pub window: usize,
    pub words: Vec<Vec<Symbol>>,
}

impl SftText {
    pub fn to_shift(&self) -> Result<SubshiftSystem> {
        SubshiftSystem::from_words(self.alphabet, self.window, &self.words)
    }

    pub fn to_language(&self) -> Result<Sublanguage> {
        if self.window == 1 {
            let syms: Vec<Symbol> = self.words.iter().map(|w| w[0]).collect();
            let pairs: Vec<Vec<Symbol>> =
                syms.iter().flat_map(|&a| syms.iter().map(move |&b| vec![a, b])).collect();
            return Sublanguage::from_window_words(self.alphabet, 2, &pairs);
        }
        Sublanguage::from_window_words(self.alphabet, self.window, &self.words)
    }
}

fn parse_word(s: &str, alphabet: usize, line: usize) -> Result<Vec<Symbol>> {
    let err = |msg: String| DynError::Parse { line, msg };
    let syms: Vec<Symbol> = if s.contains(',') || alphabet > 10 {
        s.split(',')
            .map(|t| t.trim().parse::<Symbol>().map_err(|_| err(format!("bad symbol `{t}`"))))
            .collect::<Result<_>>()?
    } else {
        s.chars()
            .map(|c| c.to_digit(10).ok_or_else(|| err(format!("bad symbol `{c}`"))))
            .collect::<Result<_>>()?
    };
    if let Some(&bad) = syms.iter().find(|&&x| x as usize >= alphabet) {
        return Err(err(format!("symbol {bad} outside alphabet of size {alphabet}")));
    }
    Ok(syms)
}

pub fn parse_sft(text: &str) -> Result<SftText> {
    let mut alphabet = None;
    let mut window = None;
    let mut words = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| DynError::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("alphabet") {
            let m: usize = rest.trim().parse().map_err(|_| err(format!("bad alphabet size `{}`", rest.trim())))?;
            if m == 0 {
                return Err(err("alphabet must be nonempty".into()));
            }
            alphabet = Some(m);
            continue;
        }
        let m = alphabet.ok_or_else(|| err("`alphabet` must come first".into()))?;
        let mut set_window = |len: usize| match window {
            Some(w) if w != len => Err(err(format!("word length {len} mixed with length {w}"))),
            _ => {
                window = Some(len);
                Ok(())
            }
        };
        if let Some(rest) = body.strip_prefix("words") {
            let (len, list) = rest.split_once(':').ok_or_else(|| err("expected `words L: ...`".into()))?;
            let len: usize = len.trim().parse().map_err(|_| err(format!("bad word length `{}`", len.trim())))?;
            if len == 0 {
                return Err(err("word length must be positive".into()));
            }
            set_window(len)?;
            for w in list.split_whitespace() {
                let w = parse_word(w, m, line)?;
                if w.len() != len {
                    return Err(err(format!("word of length {} in a length-{len} list", w.len())));
                }
                words.push(w);
            }
        } else if let Some((a, b)) = body.split_once("->") {
            set_window(2)?;
            let sym = |t: &str| -> Result<Symbol> {
                let v: Symbol = t.trim().parse().map_err(|_| err(format!("bad symbol `{}`", t.trim())))?;
                if v as usize >= m {
                    return Err(err(format!("symbol {v} outside alphabet of size {m}")));
                }
                Ok(v)
            };
            words.push(vec![sym(a)?, sym(b)?]);
        } else {
            return Err(err(format!("unrecognized line `{body}`")));
        }
    }
    let alphabet = alphabet.ok_or(DynError::Parse { line: 0, msg: "missing `alphabet`".into() })?;
    let window = window.ok_or(DynError::Parse { line: 0, msg: "no transitions or words".into() })?;
    words.sort();
    words.dedup();
    Ok(SftText { alphabet, window, words })
}

/// SFT text for a language: its allowed words of length `len`.
pub fn sft_text(alphabet: usize, words: &[Vec<Symbol>]) -> String {
    let len = words.first().map_or(1, Vec::len);
    let sep = if alphabet > 10 { "," } else { "" };
    let mut out = format!("alphabet {alphabet}\nwords {len}:");
    for w in words {
        out.push(' ');
        out.push_str(&w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(sep));
    }
    out.push('\n');
    out
}

/// Built-in shifts: `full:M` and `golden-mean`.
pub fn named_shift(name: &str) -> Option<SubshiftSystem> {
    match name {
        "golden-mean" | "golden_mean" => Some(SubshiftSystem::golden_mean()),
        _ => {
            let m: usize = name.strip_prefix("full:")?.parse().ok()?;
            (m > 0).then(|| SubshiftSystem::full(m))
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The condensation of the chain decomposition: one node per component.
pub fn chain_dot(sys: &FiniteMetricSystem, dec: &ChainDecomposition) -> String {
    let mut out = format!("digraph chain {{\n  label=\"delta = {}\";\n", dec.delta);
    for (k, comp) in dec.components.iter().enumerate() {
        let names: Vec<String> = comp.iter().take(6).map(|&x| sys.label(x)).collect();
        let more = if comp.len() > 6 { format!(", ... ({} states)", comp.len()) } else { String::new() };
        let _ = writeln!(out, "  c{k} [label=\"{}{}\"];", dot_escape(&names.join(", ")), dot_escape(&more));
    }
    for &(a, b) in &dec.condensation {
        let _ = writeln!(out, "  c{a} -> c{b};");
    }
    out.push_str("}\n");
    out
}

pub fn entropy_csv(rep: &EntropyReport) -> String {
    let mut out = String::from("r,n,s_n,mode\n");
    for row in &rep.rows {
        let _ = writeln!(out, "{},{},{},{}", row.r, row.n, row.s_n, row.mode);
    }
    out
}

pub fn chain_csv(rows: &[(f64, &ChainDecomposition)]) -> String {
    let mut out = String::from("delta,cr_size,components,max_component\n");
    for (d, dec) in rows {
        let _ = writeln!(out, "{d},{},{},{}", dec.cr.len(), dec.components.len(), dec.max_component_size());
    }
    out
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
