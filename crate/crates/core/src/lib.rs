//! Exact computational toolkit for the coarse geometry of wreath products.
//!
//! Everything here is exact: group elements are canonical structures,
//! distances are rationals, and every certified inequality is decided
//! without floating point. The crate is `no_std` (alloc only); IO, file
//! formats and the CLI live in the companion `coarse-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod decomposition;
pub mod group;
pub mod linrep;
pub mod metric;
pub mod nerve;
pub mod ratio;
pub mod wordmetric;

pub use ratio::Rational;
