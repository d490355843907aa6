//! Spectral harmonic-analysis workbench on a discretized periodic torus.
//!
//! The crate discretizes the flat torus [0, L)^n, equips it with a unitary
//! FFT, and builds the classical singular-integral toolbox on top: Riesz
//! transforms, Poisson and conjugate Poisson extensions to the half-space,
//! a family of maximal operators, a library of function-space quasi-norms,
//! and experiment drivers that measure the equivalence of the resulting
//! Hardy-type norms on reproducible test families.

pub mod error;
pub mod grid;
pub mod operators;
pub mod maximal;
pub mod spaces;
pub mod halfspace;
pub mod hardy;
pub mod io;

pub use error::{Error, Result};
