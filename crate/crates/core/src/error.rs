use thiserror::Error;

/// Errors produced anywhere in the rule-mining pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("table is empty: {0}")]
    EmptyTable(String),

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("stratification failed: class {class} has {available} object(s), {wanted} requested for training")]
    Stratification {
        class: usize,
        available: usize,
        wanted: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("feature `{0}` is constant and cannot be fuzzified")]
    DegenerateFeature(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("attribute budget exceeded: {attributes} attributes, at most {limit} supported for exact reducts; use the per-class dependency-rule workflow instead")]
    AttributeBudget { attributes: usize, limit: usize },

    #[error("class {0} has no objects")]
    EmptyClass(usize),

    #[error("rule references unknown attribute index {index} (network has {available} inputs)")]
    Encoding { index: usize, available: usize },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Divergence { epoch: usize },

    #[error("chromosome layouts differ ({left} vs {right} bits)")]
    LayoutMismatch { left: usize, right: usize },

    #[error("network has no present links")]
    EmptyNetwork,

    #[error("statistic is undefined: {0}")]
    UndefinedStatistic(String),

    #[error("insufficient history: {available} observations, need more than {needed}")]
    InsufficientHistory { available: usize, needed: usize },

    #[error("invalid price series: {0}")]
    PriceSeries(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("[{phase}] {source}")]
    Phase {
        phase: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with the name of the pipeline phase it came from.
    pub fn in_phase(self, phase: &'static str) -> Self {
        match self {
            already @ Error::Phase { .. } => already,
            other => Error::Phase {
                phase,
                source: Box::new(other),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
