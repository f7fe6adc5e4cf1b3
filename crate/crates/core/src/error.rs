use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxError {
    #[error("malformed diagram file: {0}")]
    Format(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}` (names must be nonempty and contain no whitespace)")]
    InvalidName(String),
    #[error("edge references unknown generator `{0}`")]
    UnknownEdgeEndpoint(String),
    #[error("self-loop on generator `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(String, String),
    #[error("diagram has {0} generators; at most {max} are supported", max = crate::diagram::MAX_GENERATORS)]
    TooManyGenerators(usize),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("pair {{{0}, {1}}} is not a diagonal of any square")]
    NotADiagonal(String, String),
    #[error("assignment references a square that is not in the diagram")]
    NotASquare,
    #[error("pair {{{0}, {1}}} is not a chosen diagonal")]
    UnknownPair(String, String),
    #[error("{what} exceeded cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("ball too small: {0}")]
    BallTooSmall(String),
    #[error("element is outside the ball")]
    OutsideBall,
    #[error("k = {k} out of range 1..={len}")]
    KOutOfRange { k: usize, len: usize },
    #[error("path is not a geodesic: {0}")]
    NotGeodesic(String),
    #[error("cancellation bound violated in block {block}: {count} letters cancelled")]
    CancellationBound { block: usize, count: usize },
    #[error("forcing bound violated at k = {k}: gap {gap} > M = {m}")]
    ForcingBound { k: usize, gap: usize, m: usize },
    #[error("move precondition failed: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("search budget of {0} states exhausted")]
    BudgetExhausted(usize),
}

pub type Result<T> = std::result::Result<T, CoxError>;
