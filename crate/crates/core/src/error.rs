/*
Copyright 2026 The smlr Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
use thiserror::Error;

/// Errors raised by the geometric and planning layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("unknown guard id {0}")]
    UnknownGuard(usize),
    #[error("{which} state is invalid on level {level}")]
    InvalidEndpoint { which: &'static str, level: usize },
    #[error("{which} state lies in an occupied oracle cell")]
    OccupiedCell { which: &'static str },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant \"{invariant}\" violated: {detail}")]
    Invariant { invariant: &'static str, detail: String },
    #[error("level {level}: {source}")]
    AtLevel { level: usize, source: Box<Error> },
}

impl Error {
    /// Strips any level context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLevel { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
