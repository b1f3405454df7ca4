use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label {label} out of range 1..={d}")]
    InvalidLabel { label: usize, d: usize },

    #[error("enumeration would produce more than {limit} elements")]
    ResourceLimit { limit: usize },

    #[error("truncation mismatch: {0}")]
    TruncationMismatch(String),

    #[error("unsupported truncation: {0}")]
    UnsupportedTruncation(String),

    #[error("generator selection failed at degree {degree}: rank {rank} of {dim}")]
    RankCompletion { degree: usize, rank: usize, dim: usize },

    #[error("singular degree-{degree} matrix for the word/forest isomorphism")]
    SingularDegree { degree: usize },

    #[error("logarithm undefined: constant term is zero")]
    ZeroConstantTerm,

    #[error("element is not in the group: Lie residual {residual:e}")]
    NotGroupLike { residual: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("trajectory left the domain box at {point:?}")]
    DomainExit { point: Vec<f64> },

    #[error("ODE tolerance {tol:e} not reached within {budget} halvings")]
    ToleranceNotReached { tol: f64, budget: u32 },

    #[error("word degree {degree} exceeds budget {budget}")]
    DegreeBudget { degree: usize, budget: usize },

    #[error("empty domain box")]
    EmptyBox,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("fewer than {needed} scale levels with nonzero data ({got})")]
    TooFewLevels { needed: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
