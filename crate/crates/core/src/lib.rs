//! Projector contexts, their invariant-subspace lattices, Burnside-style
//! irreducibility of the generated matrix algebra, and bivalent (0/1)
//! truth assignments.
//!
//! All numerics are double-precision complex and governed by a single
//! [`Tolerance`] policy.

#![forbid(unsafe_code)]

pub mod burnside;
pub mod cli;
pub mod document;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod projector;
pub mod subspace;
pub mod valuation;

pub use burnside::{algebra_closure, invariant_subspace_witness, is_irreducible, AlgebraClosure, IrreducibilityReport};
pub use error::{Error, Result};
pub use lattice::{is_trivial, lat_context, lat_intersect, lat_single, LatticeFamily};
pub use linalg::{ComplexMatrix, StateVector, Tolerance, C64};
pub use projector::{pauli_contexts, ContextCollection, MaximalContext, Projector, ProjectorId};
pub use subspace::Subspace;
pub use valuation::{bivalence_report, context_valuation, ks_assignment_search, valuate, TruthValue};
