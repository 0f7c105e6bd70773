//! Exponential Riesz bases on lattice multi-tiles.
//!
//! A bounded set `Omega` that covers `R^d` exactly `k` times under the
//! translates of a full lattice `Lambda = M Z^d` admits exponential systems
//! `{e^{2 pi i l.x} : l in Lambda^* + a_s, s = 1..k}`. This crate builds the
//! shifts `a_s` from the tree structure of the lattice offsets, certifies
//! admissibility, evaluates the biorthogonal dual system, computes Riesz bounds,
//! and reconstructs point values of a function from its spectral data by
//! solving only one-dimensional Vandermonde systems.
//!
//! Module map:
//!
//! - [`lattice`]: lattices, duals, reduction to the fundamental domain.
//! - [`domain`]: multi-tiles as boxes with offset lists, the maps `omega_r`.
//! - [`tree`]: frequency trees and shift index sets.
//! - [`admissibility`]: weak / strong / perfect `(v, q)` certificates.
//! - [`system`]: the matrices `V(x)`, dual functions, Gram integrals, bounds.
//! - [`reconstruction`]: spectral data synthesis and nested reconstruction.
//! - [`io`] and [`cli`]: file formats and the `multitile` command line.

pub mod admissibility;
pub mod cli;
pub mod domain;
pub mod error;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod reconstruction;
pub mod system;
pub mod tree;
pub mod vandermonde;

pub use admissibility::{AdmissibilityCertificate, AdmissibilityClass, CheckOutcome};
pub use domain::{Cell, GridPoint, MultiTileDomain};
pub use error::{Error, Result};
pub use lattice::Lattice;
pub use reconstruction::{NestedSolver, ReconstructionResult, SpectralData};
pub use system::ShiftSet;
pub use tree::{FrequencySet, FrequencyTree, ShiftIndexSet};
