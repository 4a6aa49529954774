//! Config-driven runs: one system, a list of analyses, files out.
//!
//! ```toml
//! analyses = ["chain", "entropy", "thm12"]
//! out_dir = "out"            # relative to the config file
//! tolerance = 1e-12          # optional metric tolerance
//! seed = 7                   # recorded only
//!
//! [system]
//! generator = { name = "cantor_fan", n = 4, p = 3 }
//! # or: file = "system.json"
//! # or: sft = "golden-mean"   (also "full:M" or a path to an SFT file)
//! lambda = [0]               # states, a subset name, or for sft an SFT spec
//! max_period = 10            # truncation used by finite analyses of an sft
//!
//! [schedule.chain]
//! delta = [0.5, 0.25]
//! [schedule.thm12]
//! eps = [0.5]
//! ```
//!
//! Outputs per analysis: `<name>.txt` (verdict), plus `chain.csv`,
//! `chain_<k>.dot`, `entropy.csv`, `horseshoe.json`, `model.json`, and
//! `<name>.json` for the theorem reports. Exit codes: 0 consistent,
//! 2 hypothesis refuted or undetermined, 3 inconsistent or unsound, 1 error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{chain_table, theorem_1_1_verify, FamilyMember, Theorem11Report};
use crate::chaos::{
    appendix_verify, horseshoe_certificate, sensitive_points, symbolic_horseshoe, AppendixReport,
    HorseshoeCertificate, DEFAULT_WORD_LEN,
};
use crate::entropy::{default_r_schedule, entropy_estimate, sft_entropy, EntropyReport, SeparationMode};
use crate::error::{invalid, DynError, Result};
use crate::generators::GeneratorSpec;
use crate::io::{chain_csv, chain_dot, entropy_csv, load_system, named_shift, parse_sft, write_atomic, LoadedSystem};
use crate::metric::Tolerance;
use crate::modelbuild::{
    build_sft_model, clopen_partition, theorem_1_2_verify, Hypothesis, SftModel, Thm12Input, Thm12Report,
    Thm12Schedule,
};
use crate::symbolic::{Sublanguage, SubshiftSystem, SymbolicPoint};
use crate::system::{FiniteMetricSystem, Subset};

pub const ANALYSES: [&str; 8] = ["chain", "sen", "entropy", "horseshoe", "model", "thm11", "thm12", "appendix"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    States(Vec<usize>),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub generator: Option<GeneratorSpec>,
    pub file: Option<PathBuf>,
    pub sft: Option<String>,
    pub lambda: Option<LambdaSpec>,
    pub max_period: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSchedule {
    pub delta: Vec<f64>,
}

impl Default for ChainSchedule {
    fn default() -> Self {
        ChainSchedule { delta: vec![0.5, 0.25, 0.125] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SenSchedule {
    pub a: f64,
}

impl Default for SenSchedule {
    fn default() -> Self {
        SenSchedule { a: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Greedy,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropySchedule {
    /// Empty: the default dyadic schedule of the system.
    pub r: Vec<f64>,
    pub n_max: usize,
    pub mode: ModeName,
    pub cap: usize,
}

impl Default for EntropySchedule {
    fn default() -> Self {
        EntropySchedule { r: vec![0.5], n_max: 8, mode: ModeName::Greedy, cap: crate::entropy::DEFAULT_EXACT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HorseshoeSchedule {
    pub eps: f64,
    pub a: f64,
    pub word_len: usize,
}

impl Default for HorseshoeSchedule {
    fn default() -> Self {
        HorseshoeSchedule { eps: 0.25, a: 1.0, word_len: DEFAULT_WORD_LEN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSchedule {
    pub e: f64,
    pub n: Option<usize>,
    pub c: Option<f64>,
}

impl Default for ModelSchedule {
    fn default() -> Self {
        ModelSchedule { e: 0.25, n: None, c: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thm11Schedule {
    pub a: f64,
    pub delta: Vec<f64>,
    /// Truncation periods of the refinement family (sft systems).
    pub periods: Vec<usize>,
    pub growth_threshold: usize,
}

impl Default for Thm11Schedule {
    fn default() -> Self {
        Thm11Schedule { a: 0.5, delta: vec![0.5, 0.25], periods: (3..=6).collect(), growth_threshold: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppendixSchedule {
    pub a: f64,
    pub r: f64,
}

impl Default for AppendixSchedule {
    fn default() -> Self {
        AppendixSchedule { a: 0.5, r: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedules {
    pub chain: ChainSchedule,
    pub sen: SenSchedule,
    pub entropy: EntropySchedule,
    pub horseshoe: HorseshoeSchedule,
    pub model: ModelSchedule,
    pub thm11: Thm11Schedule,
    pub thm12: Thm12Schedule,
    pub appendix: AppendixSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub analyses: Vec<String>,
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub schedule: Schedules,
    pub out_dir: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

fn toml_line(text: &str, e: &toml::de::Error) -> usize {
    e.span().map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1)
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| DynError::Parse { line: toml_line(text, &e), msg: e.message().to_string() })?;
        if let Some(bad) = cfg.analyses.iter().find(|a| !ANALYSES.contains(&a.as_str())) {
            return Err(DynError::UnknownAnalysis(bad.clone()));
        }
        Ok(cfg)
    }
}

/// The system a config names, resolved.
#[derive(Debug, Clone)]
pub enum Source {
    Finite(LoadedSystem),
    Symbolic { ambient: SubshiftSystem, lambda: Option<Sublanguage>, max_period: usize },
}

fn resolve_path(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// A builtin name or a path to an SFT file.
pub fn load_sft(spec: &str, base: &Path) -> Result<SubshiftSystem> {
    if let Some(s) = named_shift(spec) {
        return Ok(s);
    }
    parse_sft(&std::fs::read_to_string(resolve_path(base, Path::new(spec)))?)?.to_shift()
}

fn load_language(spec: &str, base: &Path) -> Result<Sublanguage> {
    if let Some(s) = named_shift(spec) {
        return Ok(s.language());
    }
    parse_sft(&std::fs::read_to_string(resolve_path(base, Path::new(spec)))?)?.to_language()
}

pub const DEFAULT_MAX_PERIOD: usize = 10;

impl SystemConfig {
    pub fn resolve(&self, base: &Path, tolerance: Option<f64>) -> Result<Source> {
        let given = [self.generator.is_some(), self.file.is_some(), self.sft.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(invalid("[system] needs exactly one of `generator`, `file`, `sft`"));
        }
        if let Some(spec) = &self.sft {
            let ambient = load_sft(spec, base)?;
            let lambda = match &self.lambda {
                None => None,
                Some(LambdaSpec::Name(s)) => Some(load_language(s, base)?),
                Some(LambdaSpec::States(_)) => return Err(invalid("an sft lambda must be an SFT spec")),
            };
            let max_period = self.max_period.unwrap_or(DEFAULT_MAX_PERIOD);
            return Ok(Source::Symbolic { ambient, lambda, max_period });
        }
        let mut loaded = match (&self.generator, &self.file) {
            (Some(g), _) => {
                let gen = g.generate()?;
                let subsets = gen.lambda.map(|l| BTreeMap::from([("lambda".to_string(), l)])).unwrap_or_default();
                LoadedSystem { system: gen.system, subsets, parts: gen.parts }
            }
            (_, Some(f)) => load_system(&resolve_path(base, f))?,
            _ => unreachable!(),
        };
        if let Some(t) = tolerance {
            let sys = loaded.system.clone().with_tolerance(Tolerance(t))?;
            // subsets are keyed by system identity
            let rekey = |s: &Subset| sys.subset(s.iter());
            loaded.subsets = loaded.subsets.iter().map(|(k, v)| Ok((k.clone(), rekey(v)?))).collect::<Result<_>>()?;
            loaded.parts = loaded.parts.iter().map(|(k, v)| Ok((k.clone(), rekey(v)?))).collect::<Result<_>>()?;
            loaded.system = sys;
        }
        match &self.lambda {
            None => {}
            Some(LambdaSpec::States(v)) => {
                let l = loaded.system.subset(v.iter().copied())?;
                loaded.subsets.insert("lambda".into(), l);
            }
            Some(LambdaSpec::Name(n)) => {
                let l = loaded
                    .subsets
                    .get(n)
                    .or_else(|| loaded.parts.iter().find(|(p, _)| p == n).map(|(_, s)| s))
                    .cloned()
                    .ok_or_else(|| invalid(format!("no subset named `{n}`")))?;
                loaded.subsets.insert("lambda".into(), l);
            }
        }
        Ok(Source::Finite(loaded))
    }
}

/// Finite view of a source: the system, the set `K` analyses run on, and
/// an expansivity certificate when the system is a symbolic truncation.
struct FiniteView {
    system: FiniteMetricSystem,
    k: Subset,
    parts: Vec<(String, Subset)>,
    certificate: Option<crate::symbolic::ExpansivityCertificate>,
}

fn finite_view(src: &Source, min_period: usize) -> Result<FiniteView> {
    match src {
        Source::Finite(l) => Ok(FiniteView {
            system: l.system.clone(),
            k: l.lambda().cloned().unwrap_or_else(|| l.system.all()),
            parts: l.parts.clone(),
            certificate: None,
        }),
        Source::Symbolic { ambient, lambda, max_period } => {
            let system = FiniteMetricSystem::symbolic_truncation(ambient, (*max_period).max(min_period))?;
            let points = system.symbolic_points().expect("symbolic truncation");
            let k = match lambda {
                Some(l) => system.subset(
                    points.iter().enumerate().filter(|(_, x)| l.contains_point(x, 2)).map(|(i, _)| i),
                )?,
                None => system.all(),
            };
            if k.is_empty() {
                return Err(DynError::EmptySubset);
            }
            Ok(FiniteView { system, k, parts: Vec::new(), certificate: Some(ambient.expansivity_constant()) })
        }
    }
}

/// A horseshoe together with the system it lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateRecord {
    SymbolicHorseshoe { shift: SubshiftSystem, certificate: HorseshoeCertificate<SymbolicPoint> },
    FiniteHorseshoe { system: FiniteMetricSystem, certificate: HorseshoeCertificate<usize> },
}

impl CertificateRecord {
    pub fn verify(&self) -> Result<()> {
        match self {
            CertificateRecord::SymbolicHorseshoe { shift, certificate } => certificate.verify(shift, Tolerance::default()),
            CertificateRecord::FiniteHorseshoe { system, certificate } => {
                let system = system.clone().validated()?;
                certificate.verify(&system, system.tolerance())
            }
        }
    }

    pub fn summary(&self) -> String {
        match self {
            CertificateRecord::SymbolicHorseshoe { shift, certificate } => {
                horseshoe_text(certificate, certificate.realized_entropy(shift, Tolerance::default()))
            }
            CertificateRecord::FiniteHorseshoe { system, certificate } => {
                horseshoe_text(certificate, certificate.realized_entropy(system, system.tolerance()))
            }
        }
    }
}

fn horseshoe_text<P: std::fmt::Debug>(c: &HorseshoeCertificate<P>, realized: f64) -> String {
    format!(
        "horseshoe at p = {:?}\n  k = {}, m = {}, delta = {}, eps = {}, a = {} (effective {})\n  \
         words of length {}: {} realizations\n  entropy bound ln2/m = {:.6}, realized greedy estimate = {:.6}\n",
        c.p,
        c.k,
        c.m,
        c.delta,
        c.eps,
        c.a,
        c.a_effective,
        c.word_len,
        c.realizations.len(),
        c.entropy_bound,
        realized
    )
}

pub fn render_thm11(r: &Theorem11Report) -> String {
    let mut out = String::from("finite chain recurrence equivalence\n");
    for c in &r.conditions {
        let _ = writeln!(out, "  {}: {:?} ({})", c.name, c.side, c.detail);
    }
    let _ = writeln!(out, "expansivity certified on every member: {}", r.certified);
    match r.verdict {
        Some(v) => {
            let _ = writeln!(out, "verdict: {v}");
        }
        None => out.push_str("verdict: withheld (hypothesis fails: no expansivity certificate)\n"),
    }
    out
}

fn hypothesis_text(name: &str, h: &Hypothesis) -> String {
    match h {
        Hypothesis::Certified { detail } => format!("  {name}: certified ({detail})\n"),
        Hypothesis::Undetermined { detail } => format!("  {name}: undetermined ({detail})\n"),
        Hypothesis::Refuted { detail, witnesses } => {
            let mut s = format!("  {name}: hypothesis fails ({detail})\n");
            for w in witnesses.iter().take(3) {
                let part = w.part.as_deref().unwrap_or("-");
                let _ = writeln!(s, "    witness [{part}] x = {}, y = {}, sup distance {} <= e = {}", w.x, w.y, w.sup_distance, w.e);
            }
            s
        }
    }
}

pub fn render_thm12(r: &Thm12Report) -> String {
    let mut out = String::from("locally maximal sets of zero entropy\nhypotheses:\n");
    out.push_str(&hypothesis_text("shadowing", &r.shadowing));
    out.push_str(&hypothesis_text("expansive on B_b(Lambda)", &r.expansive));
    out.push_str("conditions:\n");
    for c in &r.conditions {
        let holds = c.holds.map_or("not evaluated".to_string(), |b| b.to_string());
        let ent = c.entropy.map_or(String::new(), |h| format!(", entropy {h:.6}"));
        let _ = writeln!(out, "  {}: {holds}{ent} ({})", c.name, c.detail);
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    match r.verdict {
        Some(v) => {
            let _ = writeln!(out, "verdict: {v}");
        }
        None => out.push_str("verdict: withheld (hypothesis fails)\n"),
    }
    out
}

pub fn render_appendix(sys: &FiniteMetricSystem, r: &AppendixReport) -> String {
    let mut out = format!(
        "periodic-everywhere check (a = {}, r = {})\n  every state periodic: {}\n  |Sen_a| = {}\n  |accumulation set| = {}\n  \
         Sen_a inside accumulation set: {}\n",
        r.a,
        r.r,
        r.all_periodic,
        r.sensitivity.sensitive.len(),
        r.accumulation.len(),
        r.sensitive_in_accumulation
    );
    for &x in r.outside.iter().take(10) {
        let _ = writeln!(out, "  sensitive but isolated at r: {}", sys.label(x));
    }
    if let Some(e) = &r.expansive {
        let _ = writeln!(out, "  expansive constant {}: {}", e.constant, e.note);
    }
    let _ = writeln!(out, "verdict: {}", if r.passed() { "CONSISTENT" } else { "INCONSISTENT" });
    out
}

pub fn render_model(m: &SftModel) -> String {
    format!(
        "SFT model\n  cells: {} (radius {}), c = {}, thickened diameter {}\n  window n = {} (tried {:?})\n  \
         |W| = {}, entropy {:.6}\n  itinerary in Xi: {}\n  Lambda in Gamma_c: {}\n  Gamma_c in B_c(Lambda): {}\n  \
         conjugacy up to period {}: intertwines {}, injective {}, in cells {}\n  locally maximal: {}\nverdict: {}\n",
        m.partition.len(),
        m.partition.radius,
        m.c,
        m.thickened_diameter,
        m.n,
        m.n_search,
        m.words.len(),
        m.entropy,
        m.itinerary_in_xi,
        m.lambda_in_gamma,
        m.gamma_in_ball,
        m.conjugacy.max_period,
        m.conjugacy.intertwines,
        m.conjugacy.injective,
        m.conjugacy.in_cells,
        m.maximality.locally_maximal,
        if m.sound() { "CONSISTENT" } else { "INCONSISTENT" }
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOutcome {
    pub name: String,
    pub exit_code: i32,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub outcomes: Vec<AnalysisOutcome>,
}

/// Worst code wins: 1 > 3 > 2 > 0.
pub fn combine_exit_codes(codes: impl IntoIterator<Item = i32>) -> i32 {
    let rank = |c: i32| match c {
        0 => 0,
        2 => 1,
        3 => 2,
        _ => 3,
    };
    codes.into_iter().max_by_key(|&c| rank(c)).unwrap_or(0)
}

impl PipelineReport {
    pub fn exit_code(&self) -> i32 {
        combine_exit_codes(self.outcomes.iter().map(|o| o.exit_code))
    }
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    src: &'a Source,
    out: &'a Path,
    files: Vec<PathBuf>,
}

impl Run<'_> {
    fn emit(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.out.join(name);
        write_atomic(&p, contents.as_bytes())?;
        self.files.push(p);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| invalid(e.to_string()))?;
        self.emit(name, &text)
    }

    fn analysis(&mut self, name: &str) -> Result<(i32, String)> {
        let s = &self.cfg.schedule;
        match name {
            "chain" => {
                let v = finite_view(self.src, 0)?;
                let table = chain_table(&v.system, &s.chain.delta)?;
                let rows: Vec<(f64, &_)> = table.iter().map(|(r, d)| (r.delta, d)).collect();
                self.emit("chain.csv", &chain_csv(&rows))?;
                let mut text = format!("chain recurrence on {} states\n", v.system.len());
                for (k, (row, dec)) in table.iter().enumerate() {
                    self.emit(&format!("chain_{k}.dot"), &chain_dot(&v.system, dec))?;
                    let _ = writeln!(
                        text,
                        "  delta {}: |CR| = {}, {} components, largest {}",
                        row.delta,
                        row.cr_size,
                        dec.components.len(),
                        dec.max_component_size()
                    );
                }
                Ok((0, text))
            }
            "sen" => {
                let v = finite_view(self.src, 0)?;
                let rep = sensitive_points(&v.system, &v.k, s.sen.a)?;
                let mut text = format!("Sen_{}: {} of {} states\n", s.sen.a, rep.sensitive.len(), v.k.len());
                for x in rep.sensitive.iter().take(20) {
                    let _ = writeln!(text, "  {}", v.system.label(x));
                }
                Ok((0, text))
            }
            "entropy" => {
                let v = finite_view(self.src, s.entropy.n_max + 1)?;
                let r = if s.entropy.r.is_empty() { default_r_schedule(&v.system, &v.k) } else { s.entropy.r.clone() };
                let mode = match s.entropy.mode {
                    ModeName::Greedy => SeparationMode::Greedy,
                    ModeName::Exact => SeparationMode::Exact { cap: s.entropy.cap },
                };
                let rep: EntropyReport = entropy_estimate(&v.system, &v.k, &r, s.entropy.n_max, mode)?;
                self.emit("entropy.csv", &entropy_csv(&rep))?;
                let mut text = format!("entropy estimate {:.6} ({})\n", rep.estimate, mode.tag());
                for f in &rep.fits {
                    let _ = writeln!(text, "  r = {}: slope {:.6} over n in {:?}", f.r, f.slope, f.window);
                }
                if let Source::Symbolic { ambient, lambda: None, .. } = self.src {
                    let _ = writeln!(text, "spectral entropy {:.6}", sft_entropy(ambient)?);
                }
                Ok((0, text))
            }
            "horseshoe" => {
                let h = &s.horseshoe;
                let record = match self.src {
                    Source::Symbolic { ambient, lambda, max_period } => {
                        let candidates = match lambda {
                            Some(l) => l.periodic_points(*max_period),
                            None => ambient.periodic_points(*max_period),
                        };
                        let p = candidates.into_iter().next().ok_or(DynError::EmptySubshift)?;
                        let certificate = symbolic_horseshoe(ambient, &p, h.eps, h.a, h.word_len)?;
                        CertificateRecord::SymbolicHorseshoe { shift: ambient.clone(), certificate }
                    }
                    Source::Finite(_) => {
                        let v = finite_view(self.src, 0)?;
                        let certificate = horseshoe_certificate(&v.system, &v.k, h.eps, h.a, h.word_len)?;
                        CertificateRecord::FiniteHorseshoe { system: v.system, certificate }
                    }
                };
                record.verify()?;
                self.json("horseshoe.json", &record)?;
                Ok((0, record.summary() + "certificate verified\n"))
            }
            "model" => {
                let Source::Symbolic { ambient, lambda, .. } = self.src else {
                    return Err(invalid("model needs a symbolic system (`sft`)"));
                };
                let lambda = lambda.clone().unwrap_or_else(|| ambient.language());
                let partition = clopen_partition(ambient, &lambda, s.model.e)?;
                let model = build_sft_model(ambient, &lambda, &partition, s.model.n, s.model.c)?;
                self.json("model.json", &model)?;
                Ok((if model.sound() { 0 } else { 3 }, render_model(&model)))
            }
            "thm11" => {
                let t = &s.thm11;
                let family = match self.src {
                    Source::Symbolic { ambient, .. } => {
                        t.periods.iter().map(|&p| FamilyMember::symbolic(ambient, p)).collect::<Result<Vec<_>>>()?
                    }
                    Source::Finite(l) => vec![FamilyMember { param: 0, system: l.system.clone(), certificate: None }],
                };
                let rep = theorem_1_1_verify(&family, t.a, &t.delta, t.growth_threshold)?;
                self.json("thm11.json", &rep)?;
                let code = match rep.verdict {
                    Some(crate::chain::Verdict::Consistent) => 0,
                    Some(crate::chain::Verdict::Inconsistent) => 3,
                    None => 2,
                };
                Ok((code, render_thm11(&rep)))
            }
            "thm12" => {
                let input = match self.src {
                    Source::Symbolic { ambient, lambda, .. } => Thm12Input::Symbolic {
                        ambient: ambient.clone(),
                        lambda: lambda.clone().unwrap_or_else(|| ambient.language()),
                    },
                    Source::Finite(_) => {
                        let v = finite_view(self.src, 0)?;
                        Thm12Input::Finite { system: v.system, lambda: v.k, parts: v.parts }
                    }
                };
                let rep = theorem_1_2_verify(&input, &s.thm12)?;
                self.json("thm12.json", &rep)?;
                Ok((rep.exit_code(), render_thm12(&rep)))
            }
            "appendix" => {
                let v = finite_view(self.src, 0)?;
                let rep = appendix_verify(&v.system, s.appendix.a, s.appendix.r, v.certificate.as_ref())?;
                Ok((if rep.passed() { 0 } else { 3 }, render_appendix(&v.system, &rep)))
            }
            other => Err(DynError::UnknownAnalysis(other.to_string())),
        }
    }
}

/// Runs every analysis in order. A failing analysis records exit code 1
/// and the run continues with the next one.
pub fn run_config(cfg: &PipelineConfig, base: &Path, out_override: Option<&Path>) -> Result<PipelineReport> {
    let out_dir = match (out_override, &cfg.out_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => resolve_path(base, o),
        (None, None) => base.join("out"),
    };
    let mut report = PipelineReport { out_dir: out_dir.clone(), seed: cfg.seed, outcomes: Vec::new() };
    if cfg.analyses.is_empty() {
        return Ok(report);
    }
    let src = cfg.system.resolve(base, cfg.tolerance)?;
    for name in &cfg.analyses {
        let mut run = Run { cfg, src: &src, out: &out_dir, files: Vec::new() };
        let (exit_code, summary) = match run.analysis(name) {
            Ok(r) => r,
            Err(e) => (1, format!("error: {e}\n")),
        };
        let verdict = format!("analysis: {name}\nseed: {}\n\n{summary}", cfg.seed.map_or("none".into(), |s| s.to_string()));
        let mut files = run.files;
        let txt = out_dir.join(format!("{name}.txt"));
        match write_atomic(&txt, verdict.as_bytes()) {
            Ok(()) => files.push(txt),
            Err(e) => {
                report.outcomes.push(AnalysisOutcome { name: name.clone(), exit_code: 1, summary: e.to_string(), files });
                continue;
            }
        }
        report.outcomes.push(AnalysisOutcome { name: name.clone(), exit_code, summary, files });
    }
    Ok(report)
}

/// Parses and runs a config file; relative paths resolve against its directory.
pub fn run_pipeline(path: &Path, out_override: Option<&Path>, tolerance: Option<f64>, seed: Option<u64>) -> Result<PipelineReport> {
    let mut cfg = PipelineConfig::parse(&std::fs::read_to_string(path)?)?;
    if tolerance.is_some() {
        cfg.tolerance = tolerance;
    }
    if seed.is_some() {
        cfg.seed = seed;
    }
    let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    run_config(&cfg, base, out_override)
}

/// Independent configs run concurrently; each keeps its own order.
pub fn run_pipelines(paths: &[PathBuf], out_override: Option<&Path>, tolerance: Option<f64>, seed: Option<u64>) -> Vec<Result<PipelineReport>> {
    paths
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let out = out_override.map(|o| if paths.len() > 1 { o.join(i.to_string()) } else { o.to_path_buf() });
            run_pipeline(p, out.as_deref(), tolerance, seed)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_ranking() {
        assert_eq!(combine_exit_codes([]), 0);
        assert_eq!(combine_exit_codes([0, 2]), 2);
        assert_eq!(combine_exit_codes([2, 3, 0]), 3);
        assert_eq!(combine_exit_codes([3, 1, 2]), 1);
    }

    #[test]
    fn unknown_analysis_and_line_numbers() {
        let e = PipelineConfig::parse("analyses = [\"chain\", \"lyapunov\"]\n").unwrap_err();
        assert_eq!(e, DynError::UnknownAnalysis("lyapunov".into()));
        let e = PipelineConfig::parse("analyses = []\n\n[system]\nsft = 3\n").unwrap_err();
        assert!(matches!(e, DynError::Parse { line: 4, .. }), "{e:?}");
    }

    #[test]
    fn empty_analysis_list() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig::parse("analyses = []\n").unwrap();
        let rep = run_config(&cfg, dir.path(), None).unwrap();
        assert!(rep.outcomes.is_empty());
        assert_eq!(rep.exit_code(), 0);
        assert!(!dir.path().join("out").exists());
    }

    #[test]
    fn system_needs_one_source() {
        let cfg = PipelineConfig::parse("analyses = [\"chain\"]\n[system]\nsft = \"full:2\"\nfile = \"x.json\"\n").unwrap();
        assert!(cfg.system.resolve(Path::new("."), None).is_err());
    }

    #[test]
    fn failing_analysis_reports_one() {
        let dir = tempfile::tempdir().unwrap();
        let text = "analyses = [\"model\", \"chain\"]\n[system]\ngenerator = { name = \"cantor_fan\", n = 2, p = 1 }\n";
        let rep = run_config(&PipelineConfig::parse(text).unwrap(), dir.path(), None).unwrap();
        assert_eq!(rep.outcomes[0].exit_code, 1);
        assert_eq!(rep.outcomes[1].exit_code, 0);
        assert_eq!(rep.exit_code(), 1);
        assert!(dir.path().join("out/chain.csv").exists());
        assert!(dir.path().join("out/chain_0.dot").exists());
    }
}
