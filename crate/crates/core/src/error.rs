use crate::properties::PropertyReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {0} is not a member of the lattice")]
    NotMember(String),

    #[error("invalid parameter order: {0}")]
    InvalidPoset(String),

    #[error("invalid objective: {0}")]
    InvalidObjective(String),

    #[error("invalid cost: {0}")]
    InvalidCost(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A theorem hypothesis was checked and does not hold; the report
    /// carries the violating witness.
    #[error("hypothesis rejected: {}", .0.summary())]
    Hypothesis(Box<PropertyReport>),

    #[error("every candidate has infinite adjustment cost")]
    Infeasible,

    #[error("empty set: {0}")]
    Empty(String),

    #[error("value iteration did not converge after {iterations} sweeps (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },

    /// The stationary policy enters a cycle of length > 1 instead of an
    /// absorbing point.
    #[error("optimal stationary policy cycles through {0:?}; path has no absorbing point")]
    PolicyCycle(Vec<String>),

    /// A constructive selection failed its own certificate. Under verified
    /// hypotheses this indicates an engine bug.
    #[error("certification failed: {0}")]
    Certification(String),

    #[error("instance generation failed: {0}")]
    Generator(String),

    /// A config document failed to parse; `path` locates the offending
    /// field.
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn hypothesis(report: PropertyReport) -> Self {
        Error::Hypothesis(Box::new(report))
    }
}
