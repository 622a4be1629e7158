// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radicand list is not primitive: subset products repeat {0}")]
    DependentRadicands(String),
    #[error("radicand {0} already lies in the field")]
    AlreadyContained(String),
    #[error("the unit radicand 1 cannot appear in a radicand list")]
    UnitRadicand,
    #[error("invalid radicand `{0}`: {1}")]
    InvalidRadicand(String, &'static str),
    #[error("discriminant {disc} exceeds the feasibility limit {limit}")]
    BoundExceeded { disc: i128, limit: i128 },
    #[error("class number of {0} was not resolved")]
    MissingClassNumber(String),
    #[error("no class-number oracle is configured for field {0}")]
    OracleUnavailable(String),
    #[error("oracle responder failed on `{request}`: {message} (raw reply: {raw:?})")]
    ResponderError {
        request: String,
        message: String,
        raw: String,
    },
    #[error("oracle responder timed out on `{0}`")]
    Timeout(String),
    #[error("oracle answers disagree for {key}: {old} vs {new}")]
    OracleConflict { key: String, old: u64, new: u64 },
    #[error("unknown verification table `{0}`")]
    UnknownTable(String),
    #[error("malformed {what} at {path}:{line}: {message}")]
    Format {
        what: &'static str,
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
