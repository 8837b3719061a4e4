//! Exact additive combinatorics over `Z^d` and `F_p^n`.
//!
//! Everything here is integer or rational arithmetic: sumsets, representation
//! functions, two- and four-set additive energies, the bipartition energy
//! `E_*[A]` and its relative `E_T[A]`, the translate-peeling, covering and
//! saturation procedures, the block counterexample family in `F_p^n`, and an
//! arithmetic regularity decomposition driven by split/merge local search.
//!
//! The crate is `no_std` (with `alloc`) when built without the `std` feature.
//! The `parallel` feature spreads exhaustive enumerations over a rayon pool;
//! results never depend on the number of workers.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod check;
pub mod construction;
mod error;
mod group;
mod index;
pub mod oracle;
mod par;
pub mod partition;
pub mod procedures;
mod ratio;
pub mod regularity;

pub use check::{Check, Status};
pub use error::{Error, Result};
pub use group::{parse_group_spec, GroupElement, GroupSet, GroupSpec, Sign};
pub use ratio::ExactRatio;
