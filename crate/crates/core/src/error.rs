// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the library. Every variant corresponds to a violated
/// precondition; no operation fails for any other reason.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kronecker symbol (0/0) is undefined")]
    KroneckerZeroZero,
    #[error("form ({a},{b},{c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },
    #[error("form ({a},{b},{c}) is not reduced")]
    NotReduced { a: i64, b: i64, c: i64 },
    #[error("form ({a},{b},{c}) is not primitive")]
    NotPrimitive { a: i64, b: i64, c: i64 },
    #[error("-{0} is not a discriminant (need D >= 3 and -D = 0 or 1 mod 4)")]
    NotDiscriminant(u64),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bound is vacuous: {0}")]
    VacuousBound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
