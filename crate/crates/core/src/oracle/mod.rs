//! Independent comparators: perturbation series, direct diagonalization and
//! the classical normal form of polynomial perturbations.

pub mod classical;
pub mod diagonalize;
pub mod poly;
pub mod rs;

pub use classical::{classical_birkhoff, ActionPolynomial};
pub use diagonalize::{diagonalize, diagonalize_matrix, SpectrumResult};
pub use poly::{poisson_bracket, ClassicalPolynomial};
pub use rs::rs_coefficients;
