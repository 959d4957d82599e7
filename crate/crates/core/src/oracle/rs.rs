//! Rayleigh–Schrödinger perturbation theory through third order for
//! `P₀ + εF` with `P₀` diagonal and nondegenerate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::freq::FrequencyPair;
use crate::qnf::fock::GradedMatrix;
use crate::qnf::weyl::p0_eigenvalue;

/// `[E⁽¹⁾, E⁽²⁾, E⁽³⁾]` truncated to `order` entries, summing over the whole
/// truncated lattice.
pub fn rs_coefficients(
    f: &GradedMatrix,
    omega: &FrequencyPair,
    hbar: f64,
    n: [usize; 2],
    order: usize,
) -> Result<Vec<Complex64>> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidParams(format!("order must be 1..=3, got {order}")));
    }
    let t = f.truncation;
    if !t.contains(n) {
        return Err(Error::InvalidParams(format!("{n:?} outside the truncation")));
    }
    let dim = t.dim();
    let i = t.index(n);
    let e_n = p0_eigenvalue(n, omega, hbar);
    let mut gaps = vec![Complex64::new(0.0, 0.0); dim];
    for (m, g) in gaps.iter_mut().enumerate() {
        if m == i {
            continue;
        }
        *g = e_n - p0_eigenvalue(t.point(m), omega, hbar);
        if g.norm() == 0.0 {
            return Err(Error::Resonant {
                nu: t.grading(i, m),
            });
        }
    }
    let fnn = f.at(i, i);
    let mut out = vec![fnn];
    if order >= 2 {
        let e2: Complex64 = (0..dim)
            .filter(|&m| m != i)
            .map(|m| f.at(i, m) * f.at(m, i) / gaps[m])
            .sum();
        out.push(e2);
    }
    if order >= 3 {
        let mut e3 = Complex64::new(0.0, 0.0);
        for m in (0..dim).filter(|&m| m != i) {
            let fnm = f.at(i, m);
            if fnm == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in (0..dim).filter(|&k| k != i) {
                e3 += fnm * f.at(m, k) * f.at(k, i) / (gaps[m] * gaps[k]);
            }
        }
        let shift: Complex64 = (0..dim)
            .filter(|&m| m != i)
            .map(|m| f.at(i, m) * f.at(m, i) / (gaps[m] * gaps[m]))
            .sum();
        out.push(e3 - fnn * shift);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnf::fock::FockTruncation;
    use nalgebra::Matrix2;

    #[test]
    fn two_level_against_closed_form() {
        // restricted to two coupled levels the exact eigenvalue is
        // (a+b)/2 + sqrt(((a−b)/2)² + ε²c²) with a = E_n + εf_nn
        let t = FockTruncation::new(3).unwrap();
        let w = FrequencyPair::from_parts(1.0, 0.5, 0.7, -1.0);
        let hbar = 0.3;
        let mut f = GradedMatrix::zeros(t);
        let c = Complex64::new(0.2, 0.1);
        let d = Complex64::new(0.05, -0.3);
        f.set([1, 0], [0, 1], c);
        f.set([0, 1], [1, 0], c);
        f.set([1, 0], [1, 0], d);
        let rs = rs_coefficients(&f, &w, hbar, [1, 0], 3).unwrap();
        let ea = p0_eigenvalue([1, 0], &w, hbar);
        let eb = p0_eigenvalue([0, 1], &w, hbar);
        let eps = 1e-3;
        let m = Matrix2::new(ea + d * eps, c * eps, c * eps, eb);
        let tr = m.trace() / 2.0;
        let disc = (tr * tr - m.determinant()).sqrt();
        let exact = [tr + disc, tr - disc]
            .into_iter()
            .min_by(|x, y| (x - ea).norm().total_cmp(&(y - ea).norm()))
            .unwrap();
        let series = ea + rs[0] * eps + rs[1] * eps * eps + rs[2] * eps.powi(3);
        assert!((exact - series).norm() < 1e-10, "{}", (exact - series).norm());
    }
}
