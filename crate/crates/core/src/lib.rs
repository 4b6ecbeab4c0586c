//! Matrix sum-of-squares certificates under chordal sparsity.
//!
//! The crate covers chordal graph machinery, exact polynomial matrices and
//! their symbolic transformations, numeric clique decompositions, assembly
//! of dense and sparse SOS relaxations as semidefinite programs, and
//! independent verification of the resulting certificates.

pub mod certificate;
mod error;
pub mod graph;
pub mod instances;
pub mod numeric;
pub mod poly;
pub mod sos;

pub use error::Error;
