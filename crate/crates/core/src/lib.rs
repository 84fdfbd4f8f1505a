//! Conditional bounds from the BSD and functional-equation conjectures, and
//! desk-scale verification of the BSD formula for elliptic curves over Q.
//!
//! The crate is `no_std` with `alloc`. File formats, the CLI and JSON
//! reports live in the `bsdlab` crate.

#![no_std]
#![allow(clippy::upper_case_acronyms, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod bsdcheck;
pub mod corpus;
pub mod dd;
pub mod elliptic;
pub mod invariants;
pub mod lseries;
pub mod mwsearch;
pub mod primes;
pub mod real;

pub use dd::DoubleDouble;
pub use real::{Precision, Real};
