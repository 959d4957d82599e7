//! Numerical checks of the two norm inequalities used by the iteration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::FourierSymbol;
use super::moyal::moyal_bracket;
use super::norms::{gradient_sigma_norm, sigma_norm, weighted_integral};
use crate::error::{Error, Result};

/// Relative slack granted to quadrature when deciding a verdict.
pub const QUADRATURE_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

impl InequalityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        InequalityReport {
            lhs,
            rhs,
            passed: lhs <= rhs * (1.0 + QUADRATURE_SLACK),
        }
    }

    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.lhs / self.rhs
        }
    }
}

/// `‖{g,g'}_M‖_σ ≤ ‖∇g‖_σ ‖∇g'‖_σ`.
pub fn verify_moyal_inequality(
    g: &FourierSymbol,
    gp: &FourierSymbol,
    sigma: f64,
    hbar: f64,
) -> Result<InequalityReport> {
    let lhs = sigma_norm(&moyal_bracket(g, gp, hbar)?, sigma)?;
    let rhs = gradient_sigma_norm(g, sigma)? * gradient_sigma_norm(gp, sigma)?;
    Ok(InequalityReport::new(lhs, rhs))
}

/// Euclidean norm of the finite-difference gradient of `f̂` at every node:
/// central differences inside, one-sided at the edges.
pub fn gradient_magnitude(f: &FourierSymbol) -> Vec<f64> {
    let grid = f.grid;
    let m = grid.points_per_axis;
    let h = grid.spacing();
    let d = grid.dimension;
    let stride = |k: usize| m.pow((d - 1 - k) as u32);
    (0..grid.len())
        .map(|i| {
            let mi = grid.multi_index(i);
            let mut acc = 0.0;
            for k in 0..d {
                let st = stride(k);
                let j = mi[k];
                let diff: Complex64 = if j == 0 {
                    (f.values[i + st] - f.values[i]) / h
                } else if j == m - 1 {
                    (f.values[i] - f.values[i - st]) / h
                } else {
                    (f.values[i + st] - f.values[i - st]) / (2.0 * h)
                };
                acc += diff.norm_sqr();
            }
            acc.sqrt()
        })
        .collect()
}

/// `∫ e^{σ|s|}|f̂| ≤ (1/σ) ∫ e^{σ|s|} |∇f̂|`.
pub fn verify_poincare_inequality(f: &FourierSymbol, sigma: f64) -> Result<InequalityReport> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
    }
    let lhs = sigma_norm(f, sigma)?;
    let grad = gradient_magnitude(f);
    let rhs = weighted_integral(f, |i| grad[i], 0, sigma)? / sigma;
    Ok(InequalityReport::new(lhs, rhs))
}
