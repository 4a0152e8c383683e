// SPDX-License-Identifier: Apache-2.0

use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{what} cap exceeded: {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    #[error("rejection cap of {0} attempts exceeded")]
    RejectionCap(usize),

    #[error("degree sequence has odd sum {0}")]
    OddDegreeSum(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("resumption conflict in {dir}: {msg}")]
    ResumeConflict { dir: String, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn cap(what: &'static str, value: impl Into<u128>, cap: impl Into<u128>) -> Self {
        Error::CapExceeded {
            what,
            value: value.into(),
            cap: cap.into(),
        }
    }
}
