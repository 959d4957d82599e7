//! The k-indexed conjugation scheme `Σ_k = P₀ + εZ_k + v_k` on the truncated
//! lattice.
//!
//! Each step solves `[W,P₀]/(iħ) + v_k = diag(v_k)` and conjugates by
//! `e^{ad W}`, `ad W = [W, ·]/(iħ)`. Since `ad_W P₀ = −Y` with
//! `Y = offdiag(v_k)`, the new remainder is
//!
//! `v_{k+1} = Σ_{l≥1} ad_W^l (εZ_k + v_k)/l! − Σ_{l≥1} ad_W^l Y/(l+1)!`
//!
//! and `Z_{k+1} = Z_k + diag(v_k)/ε`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::GradedMatrix;
use super::homological::homological_solve_matrix;
use super::normal_form::commutator_over_ihbar;
use crate::error::{Error, Result};
use crate::freq::{in_gamma, FrequencyPair, GammaParams};
use super::weyl::PerturbationSpec;
use crate::symcalc::gaussian::ModulusGaussian;
use crate::symcalc::norms::{gamma_sup_norm, GammaSupNorm, OmegaNorm, ProductNormKernel};
use crate::symcalc::torus::{fourier_coefficients, DEFAULT_ALIASING_THRESHOLD};
use crate::symcalc::PhaseGrid;

pub const SERIES_RELATIVE_CUT: f64 = 1e-14;
pub const SERIES_MAX_TERMS: usize = 60;
pub const CONTRACTION_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionReport {
    pub epsilon: f64,
    pub rho: f64,
    /// `‖v_k‖` for `k = 0..=k_max`, graded norm with weight `e^{ρ|ν|₁}`.
    pub remainder_norms: Vec<f64>,
    /// `‖v_{k+1}‖/‖v_k‖`, zero once the remainder vanishes.
    pub ratios: Vec<f64>,
    /// Commutator-series lengths per step.
    pub series_terms: Vec<usize>,
    /// Final `Z_k` diagonal.
    pub z_diagonal: Vec<Complex64>,
}

impl ContractionReport {
    /// Largest ratio over `k = first..`.
    pub fn max_ratio_from(&self, first: usize) -> f64 {
        self.ratios.iter().skip(first).cloned().fold(0.0, f64::max)
    }

    pub fn passes(&self, mu: f64, first: usize) -> bool {
        self.max_ratio_from(first) <= 2.0 * mu * (1.0 + CONTRACTION_SLACK)
    }
}

/// `Σ_{l≥1} c_l ad_W^l x` with `c_l = 1/(l+shift)!`, cut at a relative term size.
fn ad_series(w: &GradedMatrix, x: &GradedMatrix, hbar: f64, shift: usize) -> Result<(GradedMatrix, usize)> {
    let mut sum = GradedMatrix::zeros(x.truncation);
    let mut term = x.clone();
    let first_fact: f64 = (1..=shift).map(|k| k as f64).product();
    term = term.scale(Complex64::new(1.0 / first_fact, 0.0));
    let mut first = None;
    let mut sizes = Vec::new();
    for l in 1..=SERIES_MAX_TERMS {
        term = commutator_over_ihbar(w, &term, hbar)?.scale(Complex64::new(1.0 / (l + shift) as f64, 0.0));
        let size = term.max_abs();
        sum.add_assign(&term)?;
        sizes.push(size);
        let reference = *first.get_or_insert(size);
        if size == 0.0 || size < SERIES_RELATIVE_CUT * reference {
            return Ok((sum, l));
        }
    }
    Err(Error::NonConvergence(format!(
        "commutator series did not drop below {SERIES_RELATIVE_CUT:e} relative in {SERIES_MAX_TERMS} terms; last sizes {:?}",
        &sizes[sizes.len().saturating_sub(5)..]
    )))
}

pub fn iterate_contraction(
    f0: &GradedMatrix,
    omega: &FrequencyPair,
    hbar: f64,
    epsilon: f64,
    k_max: usize,
    rho: f64,
) -> Result<ContractionReport> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::ZeroHbar);
    }
    if !epsilon.is_finite() || !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParams(format!("bad epsilon {epsilon} or rho {rho}")));
    }
    let t = f0.truncation;
    let mut z = GradedMatrix::zeros(t);
    let mut v = f0.scale(Complex64::new(epsilon, 0.0));
    let mut norms = vec![v.graded_norm(rho)];
    let mut series_terms = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        if v.max_abs() == 0.0 {
            norms.push(0.0);
            series_terms.push(0);
            continue;
        }
        let (w, diag) = homological_solve_matrix(&v, omega, hbar)?;
        let y = v.off_diagonal_part();
        let x = z.scale(Complex64::new(epsilon, 0.0)).add(&v)?;
        let (a, la) = ad_series(&w, &x, hbar, 0)?;
        let (b, lb) = ad_series(&w, &y, hbar, 1)?;
        if epsilon != 0.0 {
            z.add_assign(&diag.scale(Complex64::new(1.0 / epsilon, 0.0)))?;
        }
        v = a.sub(&b)?;
        norms.push(v.graded_norm(rho));
        series_terms.push(la.max(lb));
    }
    let ratios = norms
        .windows(2)
        .map(|p| if p[0] == 0.0 { 0.0 } else { p[1] / p[0] })
        .collect();
    Ok(ContractionReport {
        epsilon,
        rho,
        remainder_norms: norms,
        ratios,
        series_terms,
        z_diagonal: z.diagonal(),
    })
}

/// Sampling parameters for the symbol norm of the two-mode Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolNormGrid {
    pub points_per_axis: usize,
    pub extent: f64,
    pub nu_max: i64,
    pub angular_nodes: usize,
}

impl Default for SymbolNormGrid {
    fn default() -> Self {
        SymbolNormGrid {
            points_per_axis: 32,
            extent: 10.0,
            nu_max: 16,
            angular_nodes: 128,
        }
    }
}

/// `‖f₀‖_{ρ,σ}` at one ω for `f₀ = A e^{−λ(|x|²+|ξ|²)}`, from per-mode
/// coefficient symbols: `f_ν = f^{(1)}_{ν₁} ⊗ f^{(2)}_{ν₂}`.
pub fn gaussian_f0_norm(
    amplitude: f64,
    width: f64,
    omega: &FrequencyPair,
    rho: f64,
    sigma: f64,
    sampling: &SymbolNormGrid,
) -> Result<f64> {
    let grid = PhaseGrid::new(2, sampling.points_per_axis, sampling.extent)?;
    let m0 = ModulusGaussian::new(0, 1.0, width)?;
    let m1 = ModulusGaussian::new(1, amplitude.abs(), width)?;
    let (c0, r0) = fourier_coefficients(&m0, omega, sampling.nu_max, sampling.angular_nodes, grid, DEFAULT_ALIASING_THRESHOLD)?;
    let (c1, r1) = fourier_coefficients(&m1, omega, sampling.nu_max, sampling.angular_nodes, grid, DEFAULT_ALIASING_THRESHOLD)?;
    if r0.aliasing_warning || r1.aliasing_warning {
        return Err(Error::Quadrature {
            estimate: r0.shell_fraction.max(r1.shell_fraction),
            tolerance: DEFAULT_ALIASING_THRESHOLD,
        });
    }
    let pick = |c: &crate::symcalc::TorusCoefficients, nu: i64, mode: usize| {
        let key = if mode == 0 { [nu, 0] } else { [0, nu] };
        c.get(key).cloned()
    };
    let kernel = ProductNormKernel::new(grid, sigma)?;
    let mut terms = Vec::new();
    for a in -sampling.nu_max..=sampling.nu_max {
        let Some(fa) = pick(&c0, a, 0) else { continue };
        if fa.max_abs() == 0.0 {
            continue;
        }
        for b in -sampling.nu_max..=sampling.nu_max {
            let Some(fb) = pick(&c1, b, 1) else { continue };
            if fb.max_abs() == 0.0 {
                continue;
            }
            let weight = (rho * (a.abs() + b.abs()) as f64).exp();
            terms.push(weight * kernel.norm(&fa, &fb)?);
        }
    }
    Ok(crate::symcalc::norms::pairwise_sum(&terms))
}

/// Γ-sup of [`gaussian_f0_norm`] over a declared ω sample.
pub fn gaussian_f0_gamma_norm(
    amplitude: f64,
    width: f64,
    sample: &[FrequencyPair],
    sample_spec: &str,
    rho: f64,
    sigma: f64,
    sampling: &SymbolNormGrid,
) -> Result<GammaSupNorm> {
    let norms = sample
        .iter()
        .map(|w| {
            Ok(OmegaNorm {
                omega: *w,
                norm: gaussian_f0_norm(amplitude, width, w, rho, sigma, sampling)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    gamma_sup_norm(&norms, sample_spec)
}

/// Declared finite stand-in for `sup_{ω∈Γ}`: the working ω and two
/// neighbours with imaginary parts scaled by 0.8, kept when inside Γ.
pub fn default_gamma_sample(omega: &FrequencyPair, gamma: &GammaParams) -> (Vec<FrequencyPair>, String) {
    let shrink = |z: Complex64| Complex64::new(z.re, 0.8 * z.im);
    let candidates = [
        *omega,
        FrequencyPair::new(shrink(omega.omega1), omega.omega2),
        FrequencyPair::new(omega.omega1, shrink(omega.omega2)),
    ];
    let sample: Vec<FrequencyPair> = candidates
        .iter()
        .enumerate()
        .filter(|(k, w)| *k == 0 || in_gamma(w, gamma).unwrap_or(false))
        .map(|(_, w)| *w)
        .collect();
    let spec = format!(
        "omega and imaginary parts scaled by 0.8 per mode, filtered to Gamma({}, {}, {}); {} points",
        gamma.delta1,
        gamma.delta2,
        gamma.delta,
        sample.len()
    );
    (sample, spec)
}

/// `‖f₀‖_{Γ,ρ,σ}` for perturbations in the symbol class; `None` for
/// polynomials, which are unbounded and carry no such norm.
pub fn perturbation_symbol_norm(
    spec: &PerturbationSpec,
    omega: &FrequencyPair,
    gamma: &GammaParams,
    rho: f64,
    sigma: f64,
    sampling: &SymbolNormGrid,
) -> Result<Option<GammaSupNorm>> {
    match spec {
        PerturbationSpec::Polynomial { .. } => Ok(None),
        PerturbationSpec::Gaussian { amplitude, width, .. } => {
            let (sample, desc) = default_gamma_sample(omega, gamma);
            gaussian_f0_gamma_norm(*amplitude, *width, &sample, &desc, rho, sigma, sampling).map(Some)
        }
    }
}
