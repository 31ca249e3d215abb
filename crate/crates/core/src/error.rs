use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(u32),
    #[error("graph is not connected")]
    Disconnected,
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("repeated edge {0}-{1}")]
    MultiEdge(u32, u32),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("family too small or has duplicates: {0}")]
    FamilyTooSmall(String),
    #[error("empty subspace")]
    EmptySubspace,
    #[error("missing relative projection for domain {0}")]
    MissingRho(usize),
    #[error("path ends at cone vertex {0}")]
    DanglingConeVertex(u32),
    #[error("projection of a cone vertex onto its own subspace (index {0})")]
    SelfProjection(usize),
    #[error("precondition broken: {0}")]
    PreconditionBroken(String),
    #[error("vertex {0} is not within the covering radius of any subspace")]
    NotCoboundedlyCovered(u32),
    #[error("presentation is not C'(1/6): piece ratio {0}")]
    NotSmallCancellation(String),
    #[error("measure is elementary: {0}")]
    ElementaryMeasure(String),
    #[error("translation length too small: {0}")]
    TranslationTooSmall(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error("path does not pass through an interior cone vertex")]
    NotThroughCone,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("relation conflict: {0}")]
    RelationConflict(String),
    #[error("negative input for {0}")]
    NegativeInput(String),
    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::ParseError { line, msg: msg.into() }
    }
}
