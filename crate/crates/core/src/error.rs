use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data violates a structural invariant (asymmetric adjacency,
    /// self-links, non-binary outcomes, id mismatches, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// No discordant pair (or no neighbour of an agent) carries positive
    /// kernel weight, so the matched objective is empty.
    #[error("degenerate matching: {0}")]
    DegenerateMatching(String),

    /// A logistic fit found perfectly separated data.
    #[error("perfect separation: {0}")]
    Separation(String),

    /// An optimiser stopped before meeting its tolerance.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A required input is missing, e.g. latent draws for the infeasible logit.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{}:{line}:{column}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: u64,
        column: u64,
        message: String,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
