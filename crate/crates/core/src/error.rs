use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<Violation>),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, field `{field}`: {msg}")]
    Parse { line: usize, field: String, msg: String },

    #[error("combinatorial budget exceeded: C({n}, {k}) = {count} > {budget}")]
    BudgetExceeded { n: usize, k: usize, count: u128, budget: u128 },

    #[error("LP solver failure: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse { line, field: field.into(), msg: msg.into() }
    }

    /// True for errors caused by bad user input rather than solver trouble.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Lp(_) | Error::Io(_))
    }
}
