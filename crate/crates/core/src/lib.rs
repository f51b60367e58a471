//! Numerical lab for fractional Navier-Lamé (peridynamic) operators on a
//! periodic box: spectral multipliers, lattice discretizations of the
//! nonlocal form, solvers and the diagnostics built on them.

pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod grid;
pub mod nonlocal;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{GridSpec, Point, ScalarField, VectorField};
