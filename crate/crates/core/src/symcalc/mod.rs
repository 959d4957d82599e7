//! Fourier-side symbol calculus: weighted norms, the torus action and its
//! Fourier coefficients, the Moyal bracket, the symbol-level homological
//! equation and the Gaussian test family.

pub mod gaussian;
pub mod grid;
pub mod homological;
pub mod inequalities;
pub mod moyal;
pub mod norms;
pub mod torus;

pub use gaussian::{
    gaussian_hat_coefficient, AnalyticGaussian, ModulusGaussian, GaussianSymbol,
};
pub use grid::{FourierSymbol, PhaseGrid};
pub use homological::{homological_residual, homological_solve};
pub use inequalities::{verify_moyal_inequality, verify_poincare_inequality, InequalityReport};
pub use moyal::{lie_iterates, moyal_bracket, LieIterates};
pub use norms::{gamma_sup_norm, gradient_sigma_norm, rho_sigma_norm, sigma_norm, GammaSupNorm, OmegaNorm};
pub use torus::{
    fourier_coefficients, hyperbolic_pullback, torus_pullback, PhaseFunction, PhasePoint,
    TorusCoefficients, TorusSymbol,
};
