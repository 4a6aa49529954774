use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("subset belongs to system {found:#x}, expected {expected:#x}")]
    UnknownSystem { expected: u64, found: u64 },
    #[error("empty subset")]
    EmptySubset,
    #[error("empty sequence")]
    EmptySequence,
    #[error("metric axiom violated: {0}")]
    MetricViolation(String),
    #[error("map is not a bijection: {0}")]
    NotBijective(String),
    #[error("subset is not invariant under the map")]
    NotInvariant,
    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: usize },
    #[error("point violates the transition relation at index {0}")]
    ForbiddenTransition(i64),
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("empty subshift")]
    EmptySubshift,
    #[error("sequence is not a {delta}-pseudo-orbit")]
    NotPseudoOrbit { delta: f64 },
    #[error("delta {0} too large to determine symbols (must be at most 1/4)")]
    DeltaTooLarge(f64),
    #[error("exact mode requested on {size} states, cap is {cap}")]
    OverCap { size: usize, cap: usize },
    #[error("no sensitive point found")]
    NoSensitivePoint,
    #[error("shadowing search failed at eps={eps}: {detail}")]
    ShadowingFailed { eps: f64, detail: String },
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
    #[error("cells are not disjoint at c={0}")]
    CellsOverlap(f64),
    #[error("scale {0} is below the finest scale the presentation resolves")]
    ScaleTooFine(f64),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown analysis `{0}`")]
    UnknownAnalysis(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for DynError {
    fn from(e: std::io::Error) -> Self {
        DynError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DynError>;

pub(crate) fn invalid(msg: impl Into<String>) -> DynError {
    DynError::InvalidArgument(msg.into())
}
