//! Operator-level normal form on a truncated Fock lattice.

pub mod contraction;
pub mod fock;
pub mod homological;
pub mod normal_form;
pub mod weyl;

pub use contraction::{iterate_contraction, ContractionReport};
pub use fock::{FockTruncation, GradedMatrix};
pub use homological::homological_solve_matrix;
pub use normal_form::{
    commutator_over_ihbar, eigenvalue_series, mu_and_radius, normal_form_orders, NormalFormSeries,
};
pub use weyl::{p0_eigenvalue, p0_matrix, weyl_matrix, PerturbationSpec, WeylMatrix};
