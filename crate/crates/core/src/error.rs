use thiserror::Error;

use crate::graph::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid weight matrix: {0}")]
    InvalidGraph(ValidationReport),

    #[error("degenerate graph: spectral gap {gap:e} is not positive")]
    DegenerateGraph { gap: f64 },

    #[error("{what} did not converge (residual {residual:e} after {iterations} iterations)")]
    NoConvergence {
        what: &'static str,
        residual: f64,
        iterations: usize,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported size: {0}")]
    Capability(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("missing input: {0}")]
    Missing(String),

    #[error("round {round}, agent {agent}: {source}")]
    AtAgent {
        round: usize,
        agent: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at(self, round: usize, agent: usize) -> Self {
        Error::AtAgent {
            round,
            agent,
            source: Box::new(self),
        }
    }

    /// Process exit status for this error: 2 configuration, 3 violated
    /// assumption, 4 missing input, 5 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Assumption(_) => 3,
            Error::Missing(_) | Error::Io(_) | Error::Csv(_) => 4,
            Error::Numeric(_) | Error::NoConvergence { .. } => 5,
            _ => 2,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::Dimension(_) => "dimension",
            Error::Input(_) => "input",
            Error::InvalidGraph(_) => "invalid-graph",
            Error::DegenerateGraph { .. } => "degenerate-graph",
            Error::NoConvergence { .. } => "no-convergence",
            Error::Numeric(_) => "numeric",
            Error::Capability(_) => "capability",
            Error::Contract(_) => "contract",
            Error::Config(_) => "config",
            Error::Assumption(_) => "assumption",
            Error::Missing(_) => "missing-input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
            Error::AtAgent { .. } => unreachable!("root strips context"),
        }
    }

    /// Strips `AtAgent` context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtAgent { source, .. } => source.root(),
            other => other,
        }
    }
}
