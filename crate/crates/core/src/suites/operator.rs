//! Campaigns on the truncated Fock lattice.

use num_complex::Complex64;
use rand::Rng;

use super::{sample_gamma, Check, SuiteContext, SuiteReport};
use crate::error::Result;
use crate::oracle::classical::classical_birkhoff;
use crate::oracle::diagonalize::diagonalize_many;
use crate::oracle::poly::ClassicalPolynomial;
use crate::oracle::rs::rs_coefficients;
use crate::qnf::contraction::{
    iterate_contraction, perturbation_symbol_norm, SymbolNormGrid, CONTRACTION_SLACK,
};
use crate::qnf::fock::{FockTruncation, GradedMatrix};
use crate::qnf::homological::{homological_residual_matrix, homological_solve_matrix};
use crate::qnf::normal_form::{eigenvalue_series, mu_and_radius, normal_form_orders, ratio_test_radius};
use crate::qnf::weyl::{polynomial_matrix, weyl_matrix, PerturbationSpec};
use crate::stats::{linear_fit, log_log_slope};

pub const HOMOLOGICAL_CASES: usize = 100;
pub const HOMOLOGICAL_N_MAX: usize = 12;
pub const RS_HBARS: [f64; 2] = [1.0, 0.1];
pub const RS_POINTS: [[usize; 2]; 2] = [[0, 0], [1, 2]];
pub const SLOPE_EPSILONS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
pub const SLOPE_ORDER: usize = 6;
pub const SLOPE_N_MAX: usize = 14;
pub const SLOPE_HBAR: f64 = 0.1;
/// Amplitude of the slope-test Gaussian: places `ε = 10⁻²` near a quarter
/// of the empirical radius so that the `ε⁷` term clears roundoff.
pub const SLOPE_AMPLITUDE: f64 = 40.0;
pub const CONTRACTION_HBAR: f64 = 0.1;
pub const CONTRACTION_N_MAX: usize = 12;
pub const CONTRACTION_STEPS: usize = 9;
pub const UNIFORMITY_HBARS: [f64; 3] = [1.0, 0.1, 0.01];
pub const UNIFORMITY_ORDER: usize = 8;
pub const CLASSICAL_HBARS: [f64; 3] = [0.2, 0.1, 0.05];
pub const CLASSICAL_ACTION: [f64; 2] = [0.4, 0.2];

fn random_graded(rng: &mut impl Rng, t: FockTruncation, band: usize) -> GradedMatrix {
    let mut f = GradedMatrix::zeros(t);
    let dim = t.dim();
    for row in 0..dim {
        for col in 0..dim {
            let nu = t.grading(row, col);
            if nu[0].unsigned_abs() as usize <= band && nu[1].unsigned_abs() as usize <= band {
                f.data[row * dim + col] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    f.refresh_bandwidth();
    f
}

pub fn homological(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut rng = ctx.rng(5);
    let t = FockTruncation::new(HOMOLOGICAL_N_MAX)?;
    let mut worst = 0.0f64;
    let mut worst_diag_w = 0.0f64;
    for _ in 0..HOMOLOGICAL_CASES {
        let omega = sample_gamma(&mut rng, &ctx.gamma);
        let hbar = rng.gen_range(0.01..1.0);
        let band = rng.gen_range(1..=3);
        let f = random_graded(&mut rng, t, band);
        let (w, z) = homological_solve_matrix(&f, &omega, hbar)?;
        worst = worst.max(homological_residual_matrix(&w, &f, &z, &omega, hbar, band)?);
        worst_diag_w = worst_diag_w.max(w.diagonal().iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let checks = vec![
        Check::at_most(
            "max_interior_residual",
            worst,
            1e-12,
            format!("{HOMOLOGICAL_CASES} random graded matrices, n_max {HOMOLOGICAL_N_MAX}, bandwidth <= 3"),
        ),
        Check::at_most("max_generator_diagonal", worst_diag_w, 0.0, "W has no diagonal"),
    ];
    Ok(SuiteReport::new("homological", ctx.seed, checks))
}

pub fn rs_match(ctx: &SuiteContext) -> Result<SuiteReport> {
    let spec = PerturbationSpec::default_gaussian();
    let t = FockTruncation::new(10)?;
    let mut worst = 0.0f64;
    for hbar in RS_HBARS {
        let f = weyl_matrix(&spec, &ctx.omega, hbar, t)?.matrix;
        let nf = normal_form_orders(&f, &ctx.omega, hbar, 3)?;
        for n in RS_POINTS {
            let rs = rs_coefficients(&f, &ctx.omega, hbar, n, 3)?;
            for p in 1..=3 {
                let a = nf.coefficient(n, p)?;
                worst = worst.max((a - rs[p - 1]).norm() / rs[p - 1].norm());
            }
        }
    }
    let checks = vec![Check::at_most(
        "max_relative_difference",
        worst,
        1e-8,
        "orders 1..3, hbar in {1, 0.1}, n in {(0,0), (1,2)}",
    )];
    Ok(SuiteReport::new("rs-match", ctx.seed, checks))
}

pub fn spectrum_match(ctx: &SuiteContext) -> Result<SuiteReport> {
    let spec = PerturbationSpec::Gaussian {
        amplitude: SLOPE_AMPLITUDE,
        width: 0.5,
        band_limit: 2,
    };
    let t = FockTruncation::new(SLOPE_N_MAX)?;
    let f = weyl_matrix(&spec, &ctx.omega, SLOPE_HBAR, t)?.matrix;
    let nf = normal_form_orders(&f, &ctx.omega, SLOPE_HBAR, SLOPE_ORDER)?;
    let spectra = diagonalize_many(&f, &ctx.omega, SLOPE_HBAR, &SLOPE_EPSILONS, Some(&[[0, 0]]))?;
    let mut pts = Vec::new();
    let mut checks = Vec::new();
    for (eps, s) in SLOPE_EPSILONS.iter().zip(&spectra) {
        let (series, _) = eigenvalue_series(&nf, [0, 0], *eps)?;
        let direct = s.get([0, 0]).expect("label tracked");
        let err = (series - direct).norm();
        checks.push(Check::info(&format!("error_eps_{eps}"), err, "|series - diagonalization|"));
        pts.push((*eps, err));
    }
    let slope = log_log_slope(&pts);
    let target = (SLOPE_ORDER + 1) as f64;
    checks.insert(
        0,
        Check::at_most(
            "slope_deviation",
            (slope - target).abs(),
            0.5,
            format!("log-log slope {slope:.4} against {target}"),
        ),
    );
    checks.insert(1, Check::info("slope", slope, ""));
    Ok(SuiteReport::new("spectrum-match", ctx.seed, checks))
}

/// `ε*` for the default Gaussian; the ħ argument is deliberately unused by
/// the norm and only threads through to show it does not enter.
pub fn gaussian_epsilon_star(ctx: &SuiteContext, _hbar: f64) -> Result<(f64, f64)> {
    let spec = PerturbationSpec::default_gaussian();
    let norm = perturbation_symbol_norm(&spec, &ctx.omega, &ctx.gamma, ctx.rho, ctx.sigma, &SymbolNormGrid::default())?
        .expect("Gaussian carries a symbol norm");
    let (_, eps_star) = mu_and_radius(norm.value, ctx.sigma, 0.0)?;
    Ok((norm.value, eps_star))
}

pub fn contraction_ratios(ctx: &SuiteContext) -> Result<Vec<Check>> {
    let (norm, eps_star) = gaussian_epsilon_star(ctx, CONTRACTION_HBAR)?;
    let epsilon = eps_star / 2.0;
    let (mu, _) = mu_and_radius(norm, ctx.sigma, epsilon)?;
    let t = FockTruncation::new(CONTRACTION_N_MAX)?;
    let f = weyl_matrix(&PerturbationSpec::default_gaussian(), &ctx.omega, CONTRACTION_HBAR, t)?.matrix;
    let report = iterate_contraction(&f, &ctx.omega, CONTRACTION_HBAR, epsilon, CONTRACTION_STEPS, ctx.rho)?;
    let bound = 2.0 * mu * (1.0 + CONTRACTION_SLACK);
    let worst = report.ratios[1..].iter().cloned().fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("max_ratio_k1_to_8", worst, bound, format!("eps = eps*/2 = {epsilon:e}, 2 mu (1 + 0.05)")),
        Check::at_most("ratio_k0", report.ratios[0], bound, "first step"),
        Check::info("mu", mu, ""),
        Check::info("f0_norm", norm, "Gamma-sampled rho-sigma norm"),
        Check::info("final_remainder", *report.remainder_norms.last().unwrap_or(&0.0), ""),
    ])
}

pub fn hbar_uniformity(ctx: &SuiteContext) -> Result<Vec<Check>> {
    let mut stars = Vec::new();
    let mut checks = Vec::new();
    let t = FockTruncation::new(CONTRACTION_N_MAX)?;
    for hbar in UNIFORMITY_HBARS {
        let (_, eps_star) = gaussian_epsilon_star(ctx, hbar)?;
        stars.push(eps_star);
        let f = weyl_matrix(&PerturbationSpec::default_gaussian(), &ctx.omega, hbar, t)?.matrix;
        let nf = normal_form_orders(&f, &ctx.omega, hbar, UNIFORMITY_ORDER)?;
        let radius = ratio_test_radius(&nf, [0, 0], 3)?;
        checks.push(Check::at_least(
            &format!("ratio_radius_hbar_{hbar}"),
            radius,
            eps_star / 2.0,
            "ratio-test fit over p = 3..8 against eps*/2",
        ));
    }
    let spread = stars.iter().filter(|s| s.to_bits() != stars[0].to_bits()).count();
    checks.insert(
        0,
        Check::at_most("epsilon_star_bit_mismatches", spread as f64, 0.0, format!("eps* = {:e}", stars[0])),
    );
    Ok(checks)
}

pub fn contraction(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut checks = contraction_ratios(ctx)?;
    checks.extend(hbar_uniformity(ctx)?);
    Ok(SuiteReport::new("contraction", ctx.seed, checks))
}

/// Cubic plus quartic test perturbation in `(x₁, ξ₁, x₂, ξ₂)`.
pub fn classical_test_polynomial() -> ClassicalPolynomial {
    let mut f = ClassicalPolynomial::zero();
    for (e, c) in [
        ([2, 0, 1, 0], 0.5),
        ([1, 1, 0, 1], 0.3),
        ([4, 0, 0, 0], 0.25),
        ([2, 0, 2, 0], 0.2),
        ([0, 2, 0, 2], 0.1),
    ] {
        f.add_term(e, Complex64::new(c, 0.0));
    }
    f
}

pub fn classical_limit(ctx: &SuiteContext) -> Result<SuiteReport> {
    let poly = classical_test_polynomial();
    let y = classical_birkhoff(&poly, &ctx.omega, 3)?;
    let mut values: Vec<Vec<Complex64>> = vec![Vec::new(); 3];
    for hbar in CLASSICAL_HBARS {
        let n = [
            (CLASSICAL_ACTION[0] / hbar).round() as usize,
            (CLASSICAL_ACTION[1] / hbar).round() as usize,
        ];
        let band = 4;
        let t = FockTruncation::new(n[0].max(n[1]) + band + 2)?;
        let f = polynomial_matrix(&poly, &ctx.omega, hbar, t)?;
        let nf = normal_form_orders(&f, &ctx.omega, hbar, 3)?;
        for p in 1..=3 {
            values[p - 1].push(nf.coefficient(n, p)?);
        }
    }
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_quadratic = 0.0f64;
    for p in 1..=3 {
        let target = y[p - 1].eval(CLASSICAL_ACTION);
        let fit = |part: fn(&Complex64) -> f64| {
            let pts: Vec<(f64, f64)> = CLASSICAL_HBARS.iter().zip(&values[p - 1]).map(|(h, v)| (*h, part(v))).collect();
            linear_fit(&pts).1
        };
        let linear = Complex64::new(fit(|v| v.re), fit(|v| v.im));
        let rel = (linear - target).norm() / target.norm();
        worst = worst.max(rel);
        // exact quadratic through the three points, evaluated at ħ = 0
        let [h0, h1, h2] = CLASSICAL_HBARS;
        let v = &values[p - 1];
        let quad = v[0] * (h1 * h2 / ((h0 - h1) * (h0 - h2)))
            + v[1] * (h0 * h2 / ((h1 - h0) * (h1 - h2)))
            + v[2] * (h0 * h1 / ((h2 - h0) * (h2 - h1)));
        let rel_quad = (quad - target).norm() / target.norm();
        worst_quadratic = worst_quadratic.max(rel_quad);
        checks.push(Check::info(&format!("relative_error_linear_p{p}"), rel, format!("Y_{p}(I) = {target}")));
        checks.push(Check::info(&format!("relative_error_quadratic_p{p}"), rel_quad, ""));
    }
    checks.insert(
        0,
        Check::at_most(
            "max_relative_error_linear",
            worst,
            1e-6,
            "linear least-squares extrapolation in hbar over {0.2, 0.1, 0.05} at I = (0.4, 0.2)",
        ),
    );
    checks.push(Check::info("max_relative_error_quadratic", worst_quadratic, "three-point Richardson"));
    Ok(SuiteReport::new("classical-limit", ctx.seed, checks))
}
