use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("Coxeter graph is not of finite type")]
    NotFinite,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("group order exceeds enumeration bound {0}")]
    BoundExceeded(usize),
    #[error("elements belong to different Coxeter contexts")]
    ContextMismatch,
    #[error("folding violation at edge {edge:?}: {clause}")]
    FoldingViolation { edge: (usize, usize), clause: String },
    #[error("quiver is not foldable: {0}")]
    NotFoldable(String),
    #[error("unclassifiable chordless cycle {0:?}")]
    UnclassifiedCycle(Vec<usize>),
    #[error("sign-coherence violated: {0}")]
    SignCoherence(String),
    #[error("exchange graph budget of {0} vertices exceeded")]
    BudgetExceeded(usize),
    #[error("polygon failed to close: {0}")]
    PolygonClosure(String),
    #[error("quiver mismatch: {0}")]
    QuiverMismatch(String),
    #[error("word of length {len} exceeds the cap of {cap} letters")]
    WordTooLong { len: usize, cap: usize },
    #[error("generator index {0} out of range")]
    GeneratorOutOfRange(usize),
    #[error("unknown type label {0:?}")]
    UnknownType(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("path dependence detected: {0}")]
    PathDependence(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
