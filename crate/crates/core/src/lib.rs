//! Coloring semigroups of strongly connected d-out digraphs and exact
//! spectral periodicity analysis of irreducible stochastic matrices.
//!
//! The crate has four subsystems:
//!
//! - [`digraph`] — directed multigraphs, strong connectivity, the cycle-gcd
//!   period, the periodic partition, and Friedman weights;
//! - [`semigroup`] — colorings of d-out graphs, the generated transformation
//!   semigroup, its kernel (minimal-rank ideal) with ranges, partitions, and
//!   maximal groups, the stability congruence, and quotient graphs;
//! - [`grcp`] — search for t-synchronizing colorings: a coloring whose
//!   kernel is a right group of rank t = period with cyclic maximal groups,
//!   plus synchronizing-word extraction;
//! - [`spectral`] — exact rational level-2 machinery: the pair-space matrix
//!   of X -> AXA*, the determinant periodicity test, fixed-space and
//!   partition recovery, indicator matrices, and invariant measures.
//!
//! All numeric work is exact rational arithmetic ([`rational`]); no floating
//! point enters any computation or report.

pub mod digraph;
pub mod error;
pub mod grcp;
pub mod rational;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
