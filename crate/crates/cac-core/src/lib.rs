//! Conflict-avoiding codes of odd prime length `p` and weight 3.
//!
//! A conflict-avoiding code (CAC) is a family of 3-subsets of `Z_p` whose
//! difference sets are pairwise disjoint. Used as binary protocol sequences,
//! such codes let every active user of a collision channel without feedback
//! get a packet through within one frame. This crate builds optimal codes for
//! odd prime lengths through the multiplicative structure of `Z_p^x`: the
//! subgroup `L = <-1, 2>`, its cosets, and the cyclotomic numbers
//! `A(i, j) = |(1 + g^i L) ∩ g^j L|` of order `ell = [Z_p^x : L]`.
//!
//! The crate is `no_std` (with `alloc`); IO, JSON formats and the command
//! line front-end live in the companion `cac-cli` crate.
//!
//! * [`modarith`] — primality, orders, primitive roots, coset classification.
//! * [`cyclotomic`] — cyclotomic numbers, the extended matrix, the sum `s(ell)`.
//! * [`squares`] — squares in shifted cosets `1 + g^k L` and their counting identities.
//! * [`codes`] — codewords, difference sets, the construction and its size formulas.
//! * [`oracle`] — slow definition-faithful reference paths used for cross-checks.
//! * [`chansim`] — collision-channel simulation of a code as protocol sequences.

#![cfg_attr(not(test), no_std)]

#[macro_use]
extern crate alloc;

pub mod chansim;
pub mod codes;
pub mod cyclotomic;
pub mod error;
pub mod modarith;
pub mod oracle;
pub mod squares;

pub use error::Error;
pub use modarith::{GroupContext, PrimeModulus};
