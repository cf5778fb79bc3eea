use thiserror::Error;

/// Everything that can go wrong while exploring graphs or estimating entropy.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expansion budget of {limit} vertices exceeded while {context}")]
    BudgetExceeded { limit: usize, context: String },

    #[error(
        "vertex {vertex} has several out-edges labelled {label}; determinize the window first"
    )]
    Nondeterministic { vertex: String, label: char },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("symbol {symbol:?} in {context:?} is not in the alphabet")]
    UnknownSymbol { symbol: char, context: String },

    #[error("forbidden set must contain at least one non-empty word")]
    EmptyForbiddenSet,

    #[error("the empty word cannot be forbidden")]
    EmptyWord,

    #[error("duplicate edge ({source_vertex}, {label}, {target_vertex})")]
    DuplicateEdge {
        source_vertex: String,
        label: char,
        target_vertex: String,
    },

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("expansion of vertex {vertex} failed: {message}")]
    Expansion { vertex: String, message: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("not enough nonzero data points to estimate a growth rate: {0}")]
    InsufficientData(String),

    #[error("no uniform connectedness constant declared or supplied")]
    MissingConnK,

    #[error("harmonic vector has no value at vertex {0}")]
    MissingHarmonicValue(String),

    #[error("harmonic vector not accepted: residual {residual:e} above tolerance {tolerance:e}")]
    HarmonicNotAccepted { residual: f64, tolerance: f64 },

    #[error(
        "power iteration did not converge after {iterations} iterations (bracket width {width:e})"
    )]
    NonConvergence { iterations: usize, width: f64 },

    #[error(
        "eigenvector has a nonpositive entry at {0}; the truncated matrix is probably reducible"
    )]
    NonPositive(String),

    #[error("edge weight for {0} is not available as an exact rational")]
    InexactWeight(String),

    #[error("no weight assigned to edge {0}")]
    MissingWeight(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
