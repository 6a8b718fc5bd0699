// SPDX-License-Identifier: Apache-2.0

//! Primes represented by positive definite binary quadratic forms.
//!
//! Exact lattice point counts in ellipses, local densities of the
//! congruence `f(u, v) = 0 (mod l)`, Dirichlet character sums attached to
//! the discriminant, and a Selberg upper bound sieve built from them.

// Float guards are written `!(x >= lo)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod error;
pub mod forms;
pub mod character;
pub mod lattice;
pub mod sieve;
pub mod verify;

pub use error::{Error, Result};
