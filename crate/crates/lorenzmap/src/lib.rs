//! One-dimensional reduction machinery for the Lorenz attractor.
//!
//! This crate implements the dynamics of expanding Lorenz maps — interval maps
//! with a single discontinuity `c`, increasing on both sides, normalized so
//! that `F(c+) = 0` and `F(c-) = 1` — with a focus on the constant-slope
//! β-transformations `F(x) = βx + α mod 1` and the symmetric family
//! `α = 1 - β/2`. On top of the maps it provides:
//!
//! - symbolic dynamics: eventually periodic binary sequences, the
//!   lexicographic order, and the kneading-invariant admissibility test
//!   ([`symbolic`]);
//! - kneading invariants, itineraries, and brute-force periodic-orbit
//!   location ([`maps`]);
//! - the ε-ladder of root parameters, kneading-based parameter recovery, and
//!   subshift-inclusion certificates ([`kneading`]);
//! - renormalization towers, primary n(k)-cycles, period-set algebra,
//!   matching and cut-and-paste diagnostics ([`renorm`]);
//! - rotation numbers and rotation-interval estimates ([`rotation`]);
//! - the invariant density of the symmetric family and entropy estimators
//!   ([`measure`]);
//! - the two-slope maps `H_{s,r}` and their conjugate β-transformations
//!   ([`nonsymmetric`]);
//! - a numerical Lorenz-system harness extracting separatrix kneading data
//!   and fitting the one-dimensional factor map ([`flow`]);
//! - Lorenz-template word and braid combinatorics ([`template`]).
//!
//! The `book/` directory of the repository is a narrative guide to the same
//! material; its code snippets are compiled and run as doc-tests through the
//! [`book`] module.

pub mod book;
pub mod flow;
pub mod kneading;
pub mod maps;
pub mod measure;
pub mod nonsymmetric;
pub mod renorm;
pub mod rotation;
pub mod symbolic;
pub mod template;
