//! Operator-level homological equation `[W, P₀]/(iħ) + F = Z`.
//!
//! `P₀` is diagonal with entries `E_n`, so `([W,P₀]/(iħ))_{mn} =
//! i⟨ω, m−n⟩ W_{mn}`. Off-diagonal entries are divided out; the diagonal is
//! kept as `Z`.

use num_complex::Complex64;

use super::fock::GradedMatrix;
use super::weyl::p0_matrix;
use crate::error::{Error, Result};
use crate::freq::FrequencyPair;

pub fn homological_solve_matrix(
    f: &GradedMatrix,
    omega: &FrequencyPair,
    hbar: f64,
) -> Result<(GradedMatrix, GradedMatrix)> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::ZeroHbar);
    }
    let t = f.truncation;
    let dim = f.dim();
    let mut w = GradedMatrix::zeros(t);
    for row in 0..dim {
        for col in 0..dim {
            if row == col {
                continue;
            }
            let v = f.at(row, col);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let nu = t.grading(row, col);
            let den = Complex64::i() * omega.dot(nu);
            if den.norm() == 0.0 {
                return Err(Error::DegenerateFrequency(format!(
                    "<omega, nu> = 0 at nu = {nu:?}"
                )));
            }
            w.data[row * dim + col] = -v / den;
        }
    }
    w.refresh_bandwidth();
    Ok((w, f.diagonal_part()))
}

/// `max |[W,P₀]/(iħ) + F − Z|` over entries whose row and column lie at
/// distance `> margin` from the truncation edge.
pub fn homological_residual_matrix(
    w: &GradedMatrix,
    f: &GradedMatrix,
    z: &GradedMatrix,
    omega: &FrequencyPair,
    hbar: f64,
    margin: usize,
) -> Result<f64> {
    let p0 = p0_matrix(f.truncation, omega, hbar);
    let lhs = w
        .commutator(&p0)?
        .scale(1.0 / (Complex64::i() * hbar))
        .add(f)?
        .sub(z)?;
    Ok(lhs.interior_max_abs(margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnf::fock::FockTruncation;

    #[test]
    fn diagonal_input_needs_no_generator() {
        let t = FockTruncation::new(4).unwrap();
        let w = FrequencyPair::from_parts(1.0, 1.0, 1.0, -2.0);
        let f = GradedMatrix::diagonal_from(t, |n| Complex64::new(n[0] as f64, -(n[1] as f64)));
        let (g, z) = homological_solve_matrix(&f, &w, 0.1).unwrap();
        assert_eq!(g.max_abs(), 0.0);
        assert_eq!(z, f);
    }

    #[test]
    fn single_entry() {
        let t = FockTruncation::new(4).unwrap();
        let w = FrequencyPair::from_parts(1.0, 1.0, 1.0, -2.0);
        let mut f = GradedMatrix::zeros(t);
        f.set([1, 0], [0, 0], Complex64::new(1.0, 0.0));
        let (g, z) = homological_solve_matrix(&f, &w, 0.7).unwrap();
        let expect = -1.0 / (Complex64::i() * Complex64::new(1.0, 1.0));
        assert!((g.get([1, 0], [0, 0]) - expect).norm() < 1e-15);
        assert!(homological_residual_matrix(&g, &f, &z, &w, 0.7, 0).unwrap() < 1e-15);
    }
}
