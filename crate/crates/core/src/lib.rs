//! Exact computations for integral blocks of category O over gl(m|n) and
//! the associated finite W-algebra quotient: tableau combinatorics,
//! characters, (graded) Cartan data, Harish-Chandra images of the center and
//! a canonical-basis engine for tensor space over quantum sl_N.

pub mod algebra;
pub mod blockan;
pub mod cache;
pub mod center;
pub mod characters;
pub mod cli;
pub mod combinat;
pub mod qcanon;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("undecidable in window: {0}")]
    Undecidable(String),
    #[error("not in block span: {0}")]
    NotInSpan(String),
    #[error("window too narrow: {0}")]
    WindowTooNarrow(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}
