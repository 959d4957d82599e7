//! Weyl quantization into the algebraic Fock basis.
//!
//! Per mode, `a = (ωx + iξ)/√(2ħω)`, so `x = √ħ(a + a†)/√(2ω)` and
//! `ξ = −i√(ħω/2)(a − a†)`. A Weyl symbol written in `α = √ħ a`,
//! `β = √ħ a†` is normal ordered by `e^{(ħ/2)∂_α∂_β}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::{FockTruncation, GradedMatrix};
use crate::error::{Error, Result};
use crate::freq::FrequencyPair;
use crate::oracle::poly::ClassicalPolynomial;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `ħ⟨ω,n⟩ + ħ(ω₁+ω₂)/2`.
pub fn p0_eigenvalue(n: [usize; 2], omega: &FrequencyPair, hbar: f64) -> Complex64 {
    hbar * (omega.dot_real([n[0] as f64, n[1] as f64]) + (omega.omega1 + omega.omega2) / 2.0)
}

pub fn p0_matrix(truncation: FockTruncation, omega: &FrequencyPair, hbar: f64) -> GradedMatrix {
    GradedMatrix::diagonal_from(truncation, |n| p0_eigenvalue(n, omega, hbar))
}

/// Perturbations that can be quantized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PerturbationSpec {
    /// Weyl symbol given as a polynomial in `(x₁, ξ₁, x₂, ξ₂)`.
    Polynomial { terms: ClassicalPolynomial },
    /// `amplitude · e^{−width (|x|²+|ξ|²)}`, matrix restricted to
    /// `|ν_k| ≤ band_limit` on each mode.
    Gaussian {
        amplitude: f64,
        width: f64,
        band_limit: usize,
    },
}

impl PerturbationSpec {
    /// `π^{-2} e^{−(|x|²+|ξ|²)/2}` with band limit 2.
    pub fn default_gaussian() -> Self {
        PerturbationSpec::Gaussian {
            amplitude: std::f64::consts::FRAC_1_PI.powi(2),
            width: 0.5,
            band_limit: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PerturbationSpec::Polynomial { terms } => {
                if terms.terms().any(|(_, c)| !(c.re.is_finite() && c.im.is_finite())) {
                    return Err(Error::InvalidParams("non-finite polynomial coefficient".into()));
                }
            }
            PerturbationSpec::Gaussian {
                amplitude,
                width,
                band_limit,
            } => {
                if !(amplitude.is_finite() && *width > 0.0 && width.is_finite()) {
                    return Err(Error::InvalidParams(format!(
                        "gaussian needs finite amplitude and positive width, got {amplitude}, {width}"
                    )));
                }
                if *band_limit == 0 {
                    return Err(Error::InvalidParams("band_limit must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylMatrix {
    pub matrix: GradedMatrix,
    /// Entries are closed-form; the estimate records the arithmetic model only.
    pub quadrature_error: f64,
    /// Largest entry removed by the band limit (zero for polynomials).
    pub dropped_max: f64,
}

pub fn weyl_matrix(
    spec: &PerturbationSpec,
    omega: &FrequencyPair,
    hbar: f64,
    truncation: FockTruncation,
) -> Result<WeylMatrix> {
    spec.validate()?;
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParams(format!("hbar must be positive, got {hbar}")));
    }
    match spec {
        PerturbationSpec::Polynomial { terms } => {
            let matrix = polynomial_matrix(terms, omega, hbar, truncation)?;
            Ok(WeylMatrix {
                matrix,
                quadrature_error: 0.0,
                dropped_max: 0.0,
            })
        }
        PerturbationSpec::Gaussian {
            amplitude,
            width,
            band_limit,
        } => {
            if 2 * band_limit > truncation.n_max {
                return Err(Error::Truncation(format!(
                    "n_max = {} cannot hold band limit {band_limit} on both sides",
                    truncation.n_max
                )));
            }
            let a = gaussian_mode_matrix(omega.omega1, *width, hbar, truncation.n_max)?;
            let b = gaussian_mode_matrix(omega.omega2, *width, hbar, truncation.n_max)?;
            let mut matrix = GradedMatrix::kron(truncation, &a, &b)?.scale(Complex64::new(*amplitude, 0.0));
            let dropped_max = matrix.band_limit(*band_limit);
            Ok(WeylMatrix {
                matrix,
                quadrature_error: f64::EPSILON * amplitude.abs(),
                dropped_max,
            })
        }
    }
}

/// `√(m!/j!)` for `j ≤ m`.
fn sqrt_falling(m: usize, j: usize) -> f64 {
    ((j + 1)..=m).map(|k| (k as f64).sqrt()).product()
}

/// Single-mode matrix of `a†^c a^d`, size `(N+1)²` row-major.
fn ladder_monomial(c: usize, d: usize, n_max: usize) -> Vec<Complex64> {
    let s = n_max + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); s * s];
    for n in d..s {
        let j = n - d;
        let m = j + c;
        if m >= s {
            continue;
        }
        out[m * s + n] = Complex64::new(sqrt_falling(n, j) * sqrt_falling(m, j), 0.0);
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Single-mode matrix of the Weyl quantization of `α^p β^q`
/// (`α = √ħ a`, `β = √ħ a†`).
fn weyl_ladder_monomial(p: usize, q: usize, hbar: f64, n_max: usize) -> Vec<Complex64> {
    let s = n_max + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); s * s];
    for k in 0..=p.min(q) {
        let coef = (hbar / 2.0).powi(k as i32) * factorial(k) * binomial(p, k) * binomial(q, k)
            * hbar.powf((p + q - 2 * k) as f64 / 2.0);
        let m = ladder_monomial(q - k, p - k, n_max);
        for (o, v) in out.iter_mut().zip(&m) {
            *o += v * coef;
        }
    }
    out
}

/// Per-mode images of `x_k`, `ξ_k` in the variables `[α₁, β₁, α₂, β₂]`
/// (polynomial exponents reused in that order).
fn ladder_images(omega: &FrequencyPair) -> [ClassicalPolynomial; 4] {
    let mut images: [ClassicalPolynomial; 4] = Default::default();
    for k in 0..2 {
        let w = omega.component(k);
        let (a, b) = (2 * k, 2 * k + 1);
        let alpha = ClassicalPolynomial::variable(a);
        let beta = ClassicalPolynomial::variable(b);
        let cx = 1.0 / (2.0 * w).sqrt();
        let cxi = -I * (w / 2.0).sqrt();
        images[a] = alpha.add(&beta).scale(cx);
        images[b] = alpha.sub(&beta).scale(cxi);
    }
    images
}

/// Rewrites a polynomial in `(x₁, ξ₁, x₂, ξ₂)` in ladder variables
/// `(α₁, β₁, α₂, β₂)`.
pub fn to_ladder_variables(p: &ClassicalPolynomial, omega: &FrequencyPair) -> ClassicalPolynomial {
    p.substitute(&ladder_images(omega))
}

pub fn polynomial_matrix(
    p: &ClassicalPolynomial,
    omega: &FrequencyPair,
    hbar: f64,
    truncation: FockTruncation,
) -> Result<GradedMatrix> {
    let ladder = to_ladder_variables(p, omega);
    let n_max = truncation.n_max;
    let mut total = GradedMatrix::zeros(truncation);
    for (e, c) in ladder.terms() {
        let a = weyl_ladder_monomial(e[0] as usize, e[1] as usize, hbar, n_max);
        let b = weyl_ladder_monomial(e[2] as usize, e[3] as usize, hbar, n_max);
        total.add_assign(&GradedMatrix::kron(truncation, &a, &b)?.scale(*c))?;
    }
    total.refresh_bandwidth();
    Ok(total)
}

/// Continuous branch of `√(1 + 2u(ω⁻¹+ω) + 4u²)` along `u ∈ [0, u_end]`.
fn sqrt_det_branch(w: Complex64, u_end: f64) -> Complex64 {
    let det = |u: f64| 1.0 + 2.0 * u * (1.0 / w + w) + 4.0 * u * u;
    let steps = 256;
    let mut root = Complex64::new(1.0, 0.0);
    for k in 1..=steps {
        let r = det(u_end * k as f64 / steps as f64).sqrt();
        root = if (r - root).norm() <= (-r - root).norm() { r } else { -r };
    }
    root
}

/// Single-mode matrix of the Weyl quantization of `e^{−λ(x²+ξ²)}`.
///
/// In ladder variables the symbol is `e^{−(pα² + 2qαβ + rβ²)}` with
/// `p = r = u(ω⁻¹−ω)`, `q = u(ω⁻¹+ω)`, `u = λħ/2`; normal ordering maps the
/// quadratic form `S = 2[[p,q],[q,r]]` to `S(I+ΣS)⁻¹`, `Σ = [[0,½],[½,0]]`,
/// with prefactor `det(I+ΣS)^{−1/2}`.
pub fn gaussian_mode_matrix(w: Complex64, width: f64, hbar: f64, n_max: usize) -> Result<Vec<Complex64>> {
    let u = width * hbar / 2.0;
    let p = u * (1.0 / w - w);
    let q = u * (1.0 / w + w);
    let r = p;
    // I + ΣS = [[1+q, r], [p, 1+q]]
    let m = [[1.0 + q, r], [p, 1.0 + q]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() < 1e-14 {
        return Err(Error::LinearAlgebra("normal-ordering determinant vanishes".into()));
    }
    let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
    let s = [[2.0 * p, 2.0 * q], [2.0 * q, 2.0 * r]];
    let sp = [
        [
            s[0][0] * inv[0][0] + s[0][1] * inv[1][0],
            s[0][0] * inv[0][1] + s[0][1] * inv[1][1],
        ],
        [
            s[1][0] * inv[0][0] + s[1][1] * inv[1][0],
            s[1][0] * inv[0][1] + s[1][1] * inv[1][1],
        ],
    ];
    let (pp, qq, rr) = (sp[0][0] / 2.0, sp[0][1] / 2.0, sp[1][1] / 2.0);
    let pref = 1.0 / sqrt_det_branch(w, u);
    debug_assert!((sqrt_det_branch(w, u).powi(2) - det).norm() < 1e-10 * det.norm().max(1.0));
    let diag_factor = 1.0 - 2.0 * qq;

    let size = n_max + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); size * size];
    for mm in 0..size {
        for nn in 0..size {
            if (mm + nn) % 2 == 1 {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (mm % 2..=mm.min(nn)).step_by(2) {
                let l = (mm - j) / 2;
                let k = (nn - j) / 2;
                let left = (-rr).powu(l as u32) / factorial(l) * sqrt_falling(mm, j);
                let right = (-pp).powu(k as u32) / factorial(k) * sqrt_falling(nn, j);
                acc += left * diag_factor.powu(j as u32) * right;
            }
            out[mm * size + nn] = pref * acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega() -> FrequencyPair {
        FrequencyPair::from_parts(1.0, 1.0, 1.0, -2.0)
    }

    #[test]
    fn p0_examples() {
        let w = omega();
        let e = p0_eigenvalue([1, 2], &w, 0.1);
        assert!((e - Complex64::new(0.4, -0.35)).norm() < 1e-15);
        assert_eq!(p0_eigenvalue([3, 4], &w, 0.0), Complex64::new(0.0, 0.0));
        let g = p0_eigenvalue([0, 0], &w, 0.5);
        assert!((g - 0.25 * (w.omega1 + w.omega2)).norm() < 1e-15);
    }

    #[test]
    fn identity_and_p0_symbols() {
        let w = omega();
        let t = FockTruncation::new(6).unwrap();
        let one = ClassicalPolynomial::constant(Complex64::new(1.0, 0.0));
        let m = polynomial_matrix(&one, &w, 0.3, t).unwrap();
        assert!(m.sub(&GradedMatrix::identity(t)).unwrap().max_abs() < 1e-15);

        // p₀ = ½ Σ (ξ_k² + ω_k² x_k²)
        let mut p0 = ClassicalPolynomial::zero();
        for k in 0..2 {
            let wk = w.component(k);
            let (x, xi) = (2 * k, 2 * k + 1);
            let mut ex = [0; 4];
            ex[x] = 2;
            let mut exi = [0; 4];
            exi[xi] = 2;
            p0.add_term(ex, wk * wk / 2.0);
            p0.add_term(exi, Complex64::new(0.5, 0.0));
        }
        let m = polynomial_matrix(&p0, &w, 0.3, t).unwrap();
        let want = p0_matrix(t, &w, 0.3);
        assert!(m.sub(&want).unwrap().max_abs() < 1e-14, "{}", m.sub(&want).unwrap().max_abs());
    }

    #[test]
    fn canonical_commutator() {
        let w = omega();
        let t = FockTruncation::new(8).unwrap();
        let hbar = 0.2;
        let x = polynomial_matrix(&ClassicalPolynomial::variable(0), &w, hbar, t).unwrap();
        let xi = polynomial_matrix(&ClassicalPolynomial::variable(1), &w, hbar, t).unwrap();
        let c = x.commutator(&xi).unwrap().scale(1.0 / (I * hbar));
        // [x, ξ]/(iħ) = 1 away from the top row of mode 1
        for n1 in 0..8 {
            for n2 in 0..=8 {
                let v = c.get([n1, n2], [n1, n2]);
                assert!((v - 1.0).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gaussian_matches_unit_frequency_closed_form() {
        let w = Complex64::new(1.0, 0.0);
        let (lam, hbar) = (0.5, 0.4);
        let m = gaussian_mode_matrix(w, lam, hbar, 10).unwrap();
        let t = lam * hbar;
        for n in 0..=10 {
            let want = 1.0 / (1.0 + t) * ((1.0 - t) / (1.0 + t)).powi(n as i32);
            assert!((m[n * 11 + n] - want).norm() < 1e-14);
            for k in 0..=10 {
                if k != n {
                    assert!(m[n * 11 + k].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn gaussian_matches_taylor_polynomial() {
        // e^{−λ(x²+ξ²)} truncated at degree 2K, quantized term by term
        let w = FrequencyPair::from_parts(1.0, 0.3, 1.2, -0.5);
        let (lam, hbar) = (0.05, 0.1);
        let t = FockTruncation::new(5).unwrap();
        let mut r2 = ClassicalPolynomial::zero();
        r2.add_term([2, 0, 0, 0], Complex64::new(1.0, 0.0));
        r2.add_term([0, 2, 0, 0], Complex64::new(1.0, 0.0));
        let mut series = ClassicalPolynomial::zero();
        let mut term = ClassicalPolynomial::constant(Complex64::new(1.0, 0.0));
        for k in 0..=14 {
            series = series.add(&term);
            term = term.mul(&r2).scale(Complex64::new(-lam / (k + 1) as f64, 0.0));
        }
        let poly = polynomial_matrix(&series, &w, hbar, t).unwrap();
        let a = gaussian_mode_matrix(w.omega1, lam, hbar, 5).unwrap();
        let ones: Vec<Complex64> = (0..36)
            .map(|k| if k / 6 == k % 6 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        let exact = GradedMatrix::kron(t, &a, &ones).unwrap();
        // compare away from the top of mode 1, where the series is exact
        let mut worst = 0.0f64;
        for m in 0..=3 {
            for n in 0..=3 {
                let d = poly.get([m, 0], [n, 0]) - exact.get([m, 0], [n, 0]);
                worst = worst.max(d.norm());
            }
        }
        assert!(worst < 1e-10, "worst {worst}");
    }

    #[test]
    fn band_limit_reports_dropped() {
        let w = omega();
        let t = FockTruncation::new(8).unwrap();
        let spec = PerturbationSpec::default_gaussian();
        let wm = weyl_matrix(&spec, &w, 1.0, t).unwrap();
        assert!(wm.matrix.bandwidth <= 2);
        assert!(wm.dropped_max > 0.0);
        let tiny = FockTruncation::new(3).unwrap();
        assert!(matches!(weyl_matrix(&spec, &w, 1.0, tiny), Err(Error::Truncation(_))));
    }
}
