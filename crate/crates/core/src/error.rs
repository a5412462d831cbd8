use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {left} vs {right} outcomes")]
    ShapeMismatch { left: usize, right: usize },

    #[error("distribution not normalized: sum = {sum}")]
    Unnormalized { sum: f64 },

    /// The two hypotheses produce identical statistics.
    #[error("hypotheses are indistinguishable: {0}")]
    Indistinguishable(String),

    /// The pair admits no second-order (refined) bound.
    #[error("degenerate hypothesis pair: {0}")]
    DegeneratePair(String),

    #[error("no crossover in [{lo:e}, {hi:e}]: {what}")]
    NoCrossover { what: String, lo: f64, hi: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::ShapeMismatch { .. } => "shape",
            Error::Unnormalized { .. } => "unnormalized",
            Error::Indistinguishable(_) => "indistinguishable",
            Error::DegeneratePair(_) => "degenerate",
            Error::NoCrossover { .. } => "no-crossover",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}
