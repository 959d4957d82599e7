//! Symbol-level homological equation `{w, p₀} + f = ζ`.
//!
//! Along the flow `t ↦ Ψ_{ωt,ω}` a coefficient `f_ν` picks up `e^{i⟨ω,ν⟩t}`,
//! and `{p₀, w}` is the flow derivative of `w`. Dividing each `f_ν`, `ν ≠ 0`,
//! by `i⟨ω,ν⟩` therefore removes it, leaving the average `ζ = f_0`.

use num_complex::Complex64;

use super::grid::FourierSymbol;
use super::torus::{torus_action, PhasePoint, TorusCoefficients};
use crate::error::Result;
use crate::freq::{small_denominator, FrequencyPair};

pub fn homological_solve(
    c: &TorusCoefficients,
    omega: &FrequencyPair,
) -> Result<(TorusCoefficients, FourierSymbol)> {
    let zeta = c.coefficients[&[0, 0]].clone();
    let mut w = c.clone();
    w.omega = *omega;
    for (nu, sym) in w.coefficients.iter_mut() {
        if *nu == [0, 0] {
            *sym = FourierSymbol::zeros(sym.grid, "w_0");
        } else {
            let den = small_denominator(omega, *nu)?;
            *sym = sym.scale(1.0 / den);
        }
    }
    Ok((w, zeta))
}

/// `d/dt w(Ψ_{ωt,ω} u)` at `t = 0` by a central difference of step `step`.
pub fn flow_derivative(
    w: &TorusCoefficients,
    omega: &FrequencyPair,
    u: &PhasePoint,
    step: f64,
) -> Complex64 {
    let at = |t: f64| {
        let phi = [omega.omega1 * t, omega.omega2 * t];
        w.eval(&torus_action(omega, phi, u))
    };
    (at(step) - at(-step)) / (2.0 * step)
}

/// `max_u |{w,p₀}(u) + f(u) − ζ(u)|` with `{w,p₀} = −d/dt w∘Ψ_{ωt}` and
/// `f = Σ_ν f_ν`.
pub fn homological_residual(
    w: &TorusCoefficients,
    c: &TorusCoefficients,
    zeta: &FourierSymbol,
    omega: &FrequencyPair,
    sample_points: &[PhasePoint],
    step: f64,
) -> f64 {
    sample_points
        .iter()
        .map(|u| {
            let bracket = -flow_derivative(w, omega, u, step);
            let zeta_u = zeta.eval_direct(&c.coordinates(u));
            (bracket + c.eval(u) - zeta_u).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::gaussian::AnalyticGaussian;
    use crate::symcalc::grid::PhaseGrid;
    use crate::symcalc::norms::{rho_sigma_norm, sigma_norm};
    use crate::symcalc::torus::{fourier_coefficients, DEFAULT_ALIASING_THRESHOLD};

    fn points() -> Vec<PhasePoint> {
        let r = |a: f64| Complex64::new(a, 0.0);
        vec![
            [r(0.2), r(0.0), r(-0.4), r(0.0)],
            [r(-0.6), r(0.3), r(0.1), r(0.5)],
            [r(0.9), r(-0.2), r(0.7), r(0.1)],
        ]
    }

    #[test]
    fn only_mean_means_nothing_to_solve() {
        let w = FrequencyPair::from_parts(1.0, 1.0, 1.0, -2.0);
        let grid = PhaseGrid::new(2, 8, 3.0).unwrap();
        let f = AnalyticGaussian::new(0, 1.0, 0.5).unwrap();
        // real unit frequency on the active mode: the pullback is φ-independent
        let real = FrequencyPair::from_parts(1.0, 0.0, 1.0, -2.0);
        let (c, _) = fourier_coefficients(&f, &real, 2, 16, grid, DEFAULT_ALIASING_THRESHOLD).unwrap();
        let (sol, zeta) = homological_solve(&c, &w).unwrap();
        assert_eq!(&zeta, c.get([0, 0]).unwrap());
        for sym in sol.coefficients.values() {
            assert!(sym.max_abs() < 1e-12);
        }
        assert!(homological_residual(&sol, &c, &zeta, &w, &points(), 1e-4) < 1e-9);
    }

    #[test]
    fn unit_coefficient_scaling() {
        let w = FrequencyPair::from_parts(1.0, 1.0, 1.0, -2.0);
        let grid = PhaseGrid::new(2, 8, 3.0).unwrap();
        let mut c = TorusCoefficients::new(
            w,
            1,
            Some(0),
            crate::symcalc::torus::nu_box(1)
                .map(|nu| (nu, FourierSymbol::zeros(grid, "0")))
                .collect(),
        )
        .unwrap();
        let one = FourierSymbol::from_fn(grid, "g", |s| {
            Complex64::new((-(s[0] * s[0] + s[1] * s[1])).exp(), 0.0)
        })
        .unwrap();
        let n = sigma_norm(&one, 0.5).unwrap();
        c.coefficients.insert([1, 0], one.scale(Complex64::new(1.0 / n, 0.0)));
        let (sol, _) = homological_solve(&c, &w).unwrap();
        let expect = 1.0 / (Complex64::i() * Complex64::new(1.0, 1.0));
        let got = sol.get([1, 0]).unwrap().values[27] / c.get([1, 0]).unwrap().values[27];
        assert!((got - expect).norm() < 1e-15);
        let ratio = rho_sigma_norm(&sol, 0.0, 0.5).unwrap();
        assert!((ratio - 1.0 / 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn residual_vanishes_for_complex_flow() {
        let w = FrequencyPair::from_parts(1.0, 0.2, 1.0, -2.0);
        let grid = PhaseGrid::new(2, 24, 7.0).unwrap();
        let f = AnalyticGaussian::new(0, 1.0, 0.5).unwrap();
        let (c, report) = fourier_coefficients(&f, &w, 10, 40, grid, DEFAULT_ALIASING_THRESHOLD).unwrap();
        assert!(!report.aliasing_warning, "{report:?}");
        let (sol, zeta) = homological_solve(&c, &w).unwrap();
        let res = homological_residual(&sol, &c, &zeta, &w, &points(), 1e-4);
        assert!(res < 1e-6, "residual {res}");

        // a 10% defect in one coefficient shows up in proportion
        let mut bad = sol.clone();
        let w1 = bad.coefficients[&[2, 0]].scale(Complex64::new(1.1, 0.0));
        bad.coefficients.insert([2, 0], w1);
        let res_bad = homological_residual(&bad, &c, &zeta, &w, &points(), 1e-4);
        assert!(res_bad > 100.0 * res.max(1e-12));
    }
}
