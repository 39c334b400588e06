use std::time::Duration;

use thiserror::Error;

use crate::strategies::LemmaSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported construct at {line}:{column}: {construct}")]
    Unsupported {
        line: usize,
        column: usize,
        construct: String,
    },

    #[error("external solver error: {0}")]
    ExternalSolver(String),

    #[error("theory query exceeded its {0:?} timeout")]
    OracleTimeout(Duration),

    /// The enumeration budget lapsed. Carries whatever lemmas were found so
    /// far; they are not certified complete.
    #[error("enumeration budget exceeded ({} lemmas found before truncation)", .0.len())]
    BudgetExceeded(Box<LemmaSet>),

    #[error("instance has {atoms} atoms, verifier cap is {cap}")]
    CapExceeded { atoms: usize, cap: usize },

    #[error("invalid lemma file: {0}")]
    LemmaFile(String),

    #[error("run cancelled")]
    Cancelled,

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn unsupported(line: usize, column: usize, construct: impl Into<String>) -> Self {
        Error::Unsupported {
            line,
            column,
            construct: construct.into(),
        }
    }
}
