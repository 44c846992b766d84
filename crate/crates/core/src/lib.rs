//! Symplectic eigenvalues of positive definite matrices constrained by a
//! labeled graph: spectra and Williamson forms, sympPD constructions, the
//! strong symplectic spectral property, and coupled zero forcing.

pub mod constructions;
pub mod continuation;
pub mod error;
pub mod graphs;
pub mod matrix;
pub mod sampling;
pub mod sssp;
pub mod symplectic;
pub mod zero_forcing;

pub use error::{Error, Result};
pub use graphs::{CoupledGraph, Coupling, LabeledGraph};
pub use matrix::{DenseSymmetric, GeneralMatrix, Permutation};
pub use symplectic::{SymplecticSpectrum, WilliamsonPair};
