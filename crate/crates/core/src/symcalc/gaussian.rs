//! The Gaussian test family and its torus-action Fourier coefficients.
//!
//! For scalar `ω = γ e^{iθ}` the pullback `e^{-|Ψ_φ u|²/2}` is again a
//! Gaussian, `e^{-⟨Q u, u⟩/2}`, with a real positive matrix `Q(γ,θ,φ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::torus::{PhaseFunction, PhasePoint, TorusSymbol};
use crate::error::{Error, Result};
use crate::freq::FrequencyPair;

pub const DEFAULT_ANGULAR_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSymbol {
    pub gamma: f64,
    pub theta: f64,
    pub kappa: f64,
}

impl GaussianSymbol {
    pub fn new(gamma: f64, theta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be positive, got {gamma}")));
        }
        Ok(GaussianSymbol {
            gamma,
            theta,
            kappa: gamma.powi(-2) + gamma * gamma - 2.0,
        })
    }

    pub fn from_omega(omega: Complex64) -> Result<Self> {
        Self::new(omega.norm(), omega.arg())
    }

    /// `[[A, B/2], [B/2, C]]`.
    pub fn q_matrix(&self, phi: f64) -> [[f64; 2]; 2] {
        let (s, c) = phi.sin_cos();
        let g = self.gamma;
        let a = c * c + g * g * s * s;
        let cc = c * c + s * s / (g * g);
        let b = self.theta.cos() * (1.0 / g - g) * (2.0 * phi).sin();
        [[a, b / 2.0], [b / 2.0, cc]]
    }

    pub fn det_q(&self, phi: f64) -> f64 {
        let q = self.q_matrix(phi);
        q[0][0] * q[1][1] - q[0][1] * q[1][0]
    }

    pub fn trace_q(&self, phi: f64) -> f64 {
        let q = self.q_matrix(phi);
        q[0][0] + q[1][1]
    }

    /// Ascending eigenvalues of `Q(φ)`.
    pub fn eigenvalues(&self, phi: f64) -> (f64, f64) {
        let t = self.trace_q(phi);
        let d = self.det_q(phi);
        let disc = (t * t / 4.0 - d).max(0.0).sqrt();
        let hi = t / 2.0 + disc;
        (d / hi, hi)
    }

    /// Larger root of `λ² − (2+κ)λ + 1`; bounds the spectrum of `Q` on both sides.
    pub fn d_bound(&self) -> f64 {
        let b = 2.0 + self.kappa;
        (b + (b * b - 4.0).max(0.0).sqrt()) / 2.0
    }

    /// Decay rate of the coefficients in `|ν|` predicted by the nearest
    /// complex zero of `det Q`.
    pub fn predicted_decay_rate(&self) -> f64 {
        let k = self.kappa * self.theta.sin().powi(2);
        if k <= 0.0 {
            return f64::INFINITY;
        }
        0.25 * (1.0 + 8.0 / k).acosh()
    }
}

fn quad_form_inverse(q: &[[f64; 2]; 2], s: &[f64]) -> f64 {
    let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
    (q[1][1] * s[0] * s[0] - 2.0 * q[0][1] * s[0] * s[1] + q[0][0] * s[1] * s[1]) / det
}

/// Angular quadrature of
/// `2/((2π)²√det Q) ∫₀^{2π} e^{-⟨Q⁻¹s,s⟩/2} e^{-iνφ} dφ`. The symbol acts on
/// one mode, so any `ν` with a nonzero second component gives zero.
pub fn gaussian_hat_coefficient(nu: [i64; 2], g: &GaussianSymbol, s: [f64; 2]) -> Complex64 {
    gaussian_hat_coefficient_with_nodes(nu, g, s, DEFAULT_ANGULAR_NODES)
}

pub fn gaussian_hat_coefficient_with_nodes(
    nu: [i64; 2],
    g: &GaussianSymbol,
    s: [f64; 2],
    nodes: usize,
) -> Complex64 {
    if nu[1] != 0 {
        return Complex64::new(0.0, 0.0);
    }
    let step = std::f64::consts::TAU / nodes as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let phi = j as f64 * step;
        let q = g.q_matrix(phi);
        let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
        let mag = (-quad_form_inverse(&q, &s) / 2.0).exp() / det.sqrt();
        acc += Complex64::from_polar(mag, -(nu[0] as f64) * phi);
    }
    // (2/(2π)²)·2π·mean = mean/π
    acc / (nodes as f64 * std::f64::consts::PI)
}

/// `c·e^{-λ(|x_k|²+|ξ_k|²)}` on mode `k`, pulled back through the moduli of
/// `Ψ`. Real and positive for every real angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusGaussian {
    pub mode: usize,
    pub amplitude: f64,
    pub width: f64,
}

impl ModulusGaussian {
    pub fn new(mode: usize, amplitude: f64, width: f64) -> Result<Self> {
        if mode > 1 {
            return Err(Error::InvalidParams(format!("mode must be 0 or 1, got {mode}")));
        }
        if !(width > 0.0 && width.is_finite() && amplitude.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "need finite amplitude and positive width, got {amplitude}, {width}"
            )));
        }
        Ok(ModulusGaussian {
            mode,
            amplitude,
            width,
        })
    }

    /// `(1/π) e^{-|u|²/2}`: the normalization in which the ν = 0 coefficient
    /// at `γ = 1` is `(1/π)e^{-|s|²/2}`.
    pub fn standard(mode: usize) -> Self {
        ModulusGaussian {
            mode,
            amplitude: std::f64::consts::FRAC_1_PI,
            width: 0.5,
        }
    }
}

impl PhaseFunction for ModulusGaussian {
    fn eval(&self, u: &PhasePoint) -> Complex64 {
        let k = self.mode;
        let r2 = u[k].norm_sqr() + u[2 + k].norm_sqr();
        Complex64::new(self.amplitude * (-self.width * r2).exp(), 0.0)
    }
}

impl TorusSymbol for ModulusGaussian {
    fn active_mode(&self) -> Option<usize> {
        Some(self.mode)
    }

    fn pullback_hat(&self, omega: &FrequencyPair, phi: [f64; 2], s: &[f64]) -> Result<Complex64> {
        let g = GaussianSymbol::from_omega(omega.component(self.mode))?;
        let q = g.q_matrix(phi[self.mode]);
        let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
        let lam = self.width;
        let v = self.amplitude / (2.0 * lam * det.sqrt())
            * (-quad_form_inverse(&q, s) / (4.0 * lam)).exp();
        Ok(Complex64::new(v, 0.0))
    }
}

/// `c·e^{-λ(x_k²+ξ_k²)}` continued analytically, so that its coefficients
/// transform as `f_ν(Ψ_φ u) = e^{iνφ} f_ν(u)` for complex `φ`. Requires the
/// pulled-back quadratic form to keep a positive definite real part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticGaussian {
    pub mode: usize,
    pub amplitude: f64,
    pub width: f64,
}

impl AnalyticGaussian {
    pub fn new(mode: usize, amplitude: f64, width: f64) -> Result<Self> {
        let a = ModulusGaussian::new(mode, amplitude, width)?;
        Ok(AnalyticGaussian {
            mode: a.mode,
            amplitude: a.amplitude,
            width: a.width,
        })
    }

    fn q_matrix(w: Complex64, phi: f64) -> [[Complex64; 2]; 2] {
        let (s, c) = phi.sin_cos();
        let a = c * c + w * w * s * s;
        let cc = c * c + s * s / (w * w);
        let b = (1.0 / w - w) * (2.0 * phi).sin();
        [[a, b / 2.0], [b / 2.0, cc]]
    }
}

impl PhaseFunction for AnalyticGaussian {
    fn eval(&self, u: &PhasePoint) -> Complex64 {
        let k = self.mode;
        self.amplitude * (-self.width * (u[k] * u[k] + u[2 + k] * u[2 + k])).exp()
    }
}

impl TorusSymbol for AnalyticGaussian {
    fn active_mode(&self) -> Option<usize> {
        Some(self.mode)
    }

    fn pullback_hat(&self, omega: &FrequencyPair, phi: [f64; 2], s: &[f64]) -> Result<Complex64> {
        let q = Self::q_matrix(omega.component(self.mode), phi[self.mode]);
        let re_det = q[0][0].re * q[1][1].re - q[0][1].re * q[0][1].re;
        if !(q[0][0].re > 0.0 && re_det > 0.0) {
            return Err(Error::InvalidParams(format!(
                "pullback at phi = {} is not integrable (real part of the form not positive)",
                phi[self.mode]
            )));
        }
        let tr = q[0][0] + q[1][1];
        let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
        // both eigenvalues have positive real part, so the principal roots
        // multiply to the continuous branch of √det
        let disc = (tr * tr / 4.0 - det).sqrt();
        let root_det = (tr / 2.0 + disc).sqrt() * (tr / 2.0 - disc).sqrt();
        let quad = (q[1][1] * s[0] * s[0] - 2.0 * q[0][1] * s[0] * s[1] + q[0][0] * s[1] * s[1]) / det;
        let lam = self.width;
        Ok(self.amplitude / (2.0 * lam * root_det) * (-quad / (4.0 * lam)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::grid::PhaseGrid;
    use crate::symcalc::torus::{fourier_coefficients, DEFAULT_ALIASING_THRESHOLD};
    use proptest::prelude::*;

    #[test]
    fn unit_modulus_collapses() {
        let g = GaussianSymbol::new(1.0, 0.7).unwrap();
        assert_eq!(g.kappa, 0.0);
        let s = [0.4, -1.2];
        let c0 = gaussian_hat_coefficient([0, 0], &g, s);
        let exact = std::f64::consts::FRAC_1_PI * (-(0.16 + 1.44) / 2.0f64).exp();
        assert!((c0 - exact).norm() < 1e-15);
        for nu in [[1, 0], [2, 0], [5, 0], [0, 1]] {
            assert!(gaussian_hat_coefficient(nu, &g, s).norm() < 1e-15);
        }
    }

    #[test]
    fn determinant_closed_form() {
        for &(gm, th) in &[(0.5, 0.3), (2.0, 1.2), (1.7, -2.0)] {
            let g = GaussianSymbol::new(gm, th).unwrap();
            for phi in [0.1, 0.9, 2.2, 4.0] {
                let (s, c) = f64::sin_cos(phi);
                let closed = 1.0 + g.kappa * (1.0 - th.cos().powi(2)) * s * s * c * c;
                assert!((g.det_q(phi) - closed).abs() < 1e-12 * closed);
            }
        }
    }

    #[test]
    fn matches_generic_torus_coefficients() {
        let w = FrequencyPair::from_parts(1.3, 0.6, 1.0, -1.0);
        let grid = PhaseGrid::new(2, 8, 3.0).unwrap();
        let (c, _) = fourier_coefficients(
            &ModulusGaussian::standard(0),
            &w,
            3,
            64,
            grid,
            DEFAULT_ALIASING_THRESHOLD,
        )
        .unwrap();
        let g = GaussianSymbol::from_omega(w.omega1).unwrap();
        for nu in [[0, 0], [2, 0], [-2, 0], [1, 0], [0, 1]] {
            let sym = c.get(nu).unwrap();
            for idx in [0, 9, 27, 36, 63] {
                let s = grid.node(idx);
                let want = gaussian_hat_coefficient_with_nodes(nu, &g, [s[0], s[1]], 64);
                assert!((sym.values[idx] - want).norm() < 1e-14, "nu {nu:?} idx {idx}");
            }
        }
    }

    #[test]
    fn analytic_agrees_with_modulus_for_real_frequency() {
        let w = FrequencyPair::from_parts(1.6, 0.0, 1.0, 0.0);
        let a = ModulusGaussian::standard(0);
        let b = AnalyticGaussian::new(0, a.amplitude, a.width).unwrap();
        for phi in [0.0, 0.4, 2.0] {
            let s = [0.3, -0.9];
            let x = a.pullback_hat(&w, [phi, 0.0], &s).unwrap();
            let y = b.pullback_hat(&w, [phi, 0.0], &s).unwrap();
            assert!((x - y).norm() < 1e-14);
        }
        let bad = FrequencyPair::from_parts(1.0, -2.0, 1.0, 0.0);
        assert!(b.pullback_hat(&bad, [std::f64::consts::FRAC_PI_2, 0.0], &[0.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn eigenvalue_sandwich(gm in 0.05f64..20.0, th in -3.2f64..3.2, phi in 0.0f64..6.3) {
            let g = GaussianSymbol::new(gm, th).unwrap();
            let d = g.d_bound();
            let (l1, l2) = g.eigenvalues(phi);
            prop_assert!(g.det_q(phi) >= 1.0 - 1e-12);
            prop_assert!(l1 >= (1.0 / d) * (1.0 - 1e-10));
            prop_assert!(l1 <= l2);
            prop_assert!(l2 <= d * (1.0 + 1e-10));
        }

        #[test]
        fn uniform_gaussian_bound(gm in 0.2f64..5.0, th in -3.2f64..3.2, nu in 0i64..8,
                                  s0 in -4.0f64..4.0, s1 in -4.0f64..4.0) {
            let g = GaussianSymbol::new(gm, th).unwrap();
            let v = gaussian_hat_coefficient([nu, 0], &g, [s0, s1]).norm();
            // Q⁻¹ ≥ 1/D, and the exponent carries a factor ½
            let bound = std::f64::consts::FRAC_1_PI * (-(s0 * s0 + s1 * s1) / (2.0 * g.d_bound())).exp();
            prop_assert!(v <= bound * (1.0 + 1e-12) + 1e-300);
        }
    }
}
