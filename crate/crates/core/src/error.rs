use crate::model::CandidateId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown candidate id {0}")]
    UnknownCandidate(CandidateId),

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("generation error: {0}")]
    Generation(String),

    #[error("instance mode does not match the requested operation: {0}")]
    ModeMismatch(&'static str),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error(transparent)]
    Lp(#[from] crate::lp::LpError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
