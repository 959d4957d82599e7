//! Campaigns on Fourier-side symbols and frequencies.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::{sample_gamma, Check, SuiteContext, SuiteReport};
use crate::error::Result;
use crate::freq::lattice_audit;
use crate::symcalc::gaussian::gaussian_hat_coefficient_with_nodes;
use crate::symcalc::inequalities::QUADRATURE_SLACK;
use crate::symcalc::moyal::moyal_bracket;
use crate::symcalc::norms::product_sigma_norm;
use crate::symcalc::{
    sigma_norm, verify_moyal_inequality, verify_poincare_inequality, FourierSymbol, GaussianSymbol,
    PhaseGrid,
};

pub const MOYAL_PAIRS: usize = 200;
pub const MOYAL_HBARS: [f64; 3] = [0.0, 0.1, 1.0];
pub const MOYAL_POINTS: usize = 16;
pub const POINCARE_SYMBOLS: usize = 200;
pub const POINCARE_SIGMAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const DENOMINATOR_SAMPLES: usize = 20;
pub const DENOMINATOR_RANGE: i64 = 200;
pub const DECAY_NU_MAX: i64 = 12;

/// Sum of one or two Gaussian bumps with random centers, widths, phases
/// and a plane-wave modulation.
pub fn random_symbol(rng: &mut impl Rng, grid: PhaseGrid, label: &str) -> Result<FourierSymbol> {
    let bumps = rng.gen_range(1..=2);
    let params: Vec<(Complex64, [f64; 2], f64, [f64; 2])> = (0..bumps)
        .map(|_| {
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let w = rng.gen_range(0.75..2.0);
            let k = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            (amp, c, w, k)
        })
        .collect();
    FourierSymbol::from_fn(grid, label, |s| {
        params
            .iter()
            .map(|(amp, c, w, k)| {
                let r2 = (s[0] - c[0]).powi(2) + (s[1] - c[1]).powi(2);
                amp * (-w * r2).exp() * Complex64::from_polar(1.0, k[0] * s[0] + k[1] * s[1])
            })
            .sum()
    })
}

/// Composite Simpson for `2π ∫₀^R r e^{σr − r²} dr`.
fn radial_gaussian_norm(sigma: f64) -> f64 {
    let n = 100_000;
    let b = 14.0;
    let h = b / n as f64;
    let f = |r: f64| r * (sigma * r - r * r).exp();
    let mut acc = f(0.0) + f(b);
    for k in 1..n {
        acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    std::f64::consts::TAU * acc * h / 3.0
}

pub fn norms(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let grid = PhaseGrid::new(2, 128, 8.0)?;
    let g = FourierSymbol::from_fn(grid, "gaussian", |s| {
        Complex64::new((-(s[0] * s[0] + s[1] * s[1])).exp(), 0.0)
    })?;
    let err = (sigma_norm(&g, ctx.sigma)? / radial_gaussian_norm(ctx.sigma) - 1.0).abs();
    checks.push(Check::at_most("radial_relative_error", err, 1e-6, "e^{-|s|^2} against radial quadrature"));

    let mut rng = ctx.rng(1);
    let small = PhaseGrid::new(2, 8, 3.0)?;
    let a = random_symbol(&mut rng, small, "a")?;
    let b = random_symbol(&mut rng, small, "b")?;
    let g4 = PhaseGrid::new(4, 8, 3.0)?;
    let full = FourierSymbol::from_fn(g4, "a*b", |s| {
        let i = small.linear_index(&[idx(small, s[0]), idx(small, s[1])]);
        let j = small.linear_index(&[idx(small, s[2]), idx(small, s[3])]);
        a.values[i] * b.values[j]
    })?;
    let direct = sigma_norm(&full, ctx.sigma)?;
    let fast = product_sigma_norm(&a, &b, ctx.sigma)?;
    checks.push(Check::at_most(
        "product_relative_error",
        (direct - fast).abs() / direct,
        1e-12,
        "tensor-product norm against the materialized 4-dimensional symbol",
    ));

    let c = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let lhs = sigma_norm(&a.scale(c), ctx.sigma)?;
    let rhs = c.norm() * sigma_norm(&a, ctx.sigma)?;
    checks.push(Check::at_most("homogeneity_relative_error", (lhs - rhs).abs() / rhs, 1e-13, ""));
    Ok(SuiteReport::new("norms", ctx.seed, checks))
}

fn idx(grid: PhaseGrid, x: f64) -> usize {
    ((x + grid.extent) / grid.spacing()).round() as usize
}

pub fn moyal(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut rng = ctx.rng(2);
    let grid = PhaseGrid::new(2, MOYAL_POINTS, 4.0)?;
    let pairs: Vec<(FourierSymbol, FourierSymbol)> = (0..MOYAL_PAIRS)
        .map(|_| Ok((random_symbol(&mut rng, grid, "g")?, random_symbol(&mut rng, grid, "g'")?)))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for hbar in MOYAL_HBARS {
        let reports = pairs
            .par_iter()
            .map(|(g, gp)| verify_moyal_inequality(g, gp, ctx.sigma, hbar))
            .collect::<Result<Vec<_>>>()?;
        let failures = reports.iter().filter(|r| !r.passed).count();
        let worst = reports.iter().map(|r| r.ratio()).fold(0.0, f64::max);
        checks.push(Check::at_most(
            &format!("violations_hbar_{hbar}"),
            failures as f64,
            0.0,
            format!("{MOYAL_PAIRS} pairs, slack {QUADRATURE_SLACK:e}"),
        ));
        checks.push(Check::info(&format!("worst_ratio_hbar_{hbar}"), worst, "max lhs/rhs"));
        // g = g' must give an identically vanishing bracket
        let self_bracket = pairs
            .par_iter()
            .map(|(g, _)| Ok(moyal_bracket(g, g, hbar)?.max_abs() / g.max_abs().max(f64::MIN_POSITIVE)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(Check::at_most(
            &format!("self_bracket_hbar_{hbar}"),
            self_bracket,
            1e-13,
            "max |{g, g}| relative to max |g|",
        ));
    }
    Ok(SuiteReport::new("moyal", ctx.seed, checks))
}

pub fn poincare(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut rng = ctx.rng(3);
    let grid = PhaseGrid::new(2, 64, 8.0)?;
    let symbols: Vec<FourierSymbol> = (0..POINCARE_SYMBOLS)
        .map(|_| random_symbol(&mut rng, grid, "f"))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for sigma in POINCARE_SIGMAS {
        let reports = symbols
            .par_iter()
            .map(|f| verify_poincare_inequality(f, sigma))
            .collect::<Result<Vec<_>>>()?;
        let failures = reports.iter().filter(|r| !r.passed).count();
        let worst = reports.iter().map(|r| r.ratio()).fold(0.0, f64::max);
        checks.push(Check::at_most(
            &format!("violations_sigma_{sigma}"),
            failures as f64,
            0.0,
            format!("{POINCARE_SYMBOLS} symbols, slack {QUADRATURE_SLACK:e}"),
        ));
        checks.push(Check::info(&format!("worst_ratio_sigma_{sigma}"), worst, "max lhs/rhs"));
    }
    Ok(SuiteReport::new("poincare", ctx.seed, checks))
}

pub fn denominators(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut rng = ctx.rng(4);
    let omegas: Vec<_> = (0..DENOMINATOR_SAMPLES).map(|_| sample_gamma(&mut rng, &ctx.gamma)).collect();
    let audits = omegas
        .par_iter()
        .map(|w| lattice_audit(w, DENOMINATOR_RANGE))
        .collect::<Result<Vec<_>>>()?;
    let below = audits
        .iter()
        .map(|a| a.closed_form - a.minimum)
        .fold(f64::NEG_INFINITY, f64::max);
    let excess = audits.iter().map(|a| a.relative_excess()).fold(0.0, f64::max);
    let checks = vec![
        Check::at_most(
            "max_shortfall_below_bound",
            below,
            1e-12,
            format!("C_delta - lattice minimum over |nu|_inf <= {DENOMINATOR_RANGE}, {DENOMINATOR_SAMPLES} omegas"),
        ),
        Check::at_most("max_relative_excess", excess, 0.05, "lattice minimum within 5% of C_delta"),
    ];
    Ok(SuiteReport::new("denominators", ctx.seed, checks))
}

/// `max_s |ĉ_ν(s)|` on a grid containing the origin.
fn coefficient_peak(g: &GaussianSymbol, nu: i64, grid: PhaseGrid, nodes: usize) -> f64 {
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let s = grid.node(i);
            gaussian_hat_coefficient_with_nodes([nu, 0], g, [s[0], s[1]], nodes).norm()
        })
        .reduce(|| 0.0, f64::max)
}

/// Decay rate from a least-squares fit of `ln max_s|ĉ_ν|` over even `ν`.
fn fitted_decay_rate(g: &GaussianSymbol, grid: PhaseGrid, nodes: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (0..=DECAY_NU_MAX)
        .step_by(2)
        .map(|nu| (nu as f64, coefficient_peak(g, nu, grid, nodes).ln()))
        .collect();
    -crate::stats::linear_fit(&pts).0
}

/// Largest `|ĉ_ν(s)| / ((1/π) e^{-|s|²/(scale·D)})` over `ν ≤ DECAY_NU_MAX` and the grid.
fn bound_ratio(g: &GaussianSymbol, grid: PhaseGrid, scale: f64) -> f64 {
    let d = g.d_bound();
    (0..=DECAY_NU_MAX)
        .flat_map(|nu| (0..grid.len()).map(move |i| (nu, i)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(nu, i)| {
            let s = grid.node(i);
            let r2 = s[0] * s[0] + s[1] * s[1];
            let c = gaussian_hat_coefficient_with_nodes([nu, 0], g, [s[0], s[1]], 256).norm();
            c / (std::f64::consts::FRAC_1_PI * (-r2 / (scale * d)).exp())
        })
        .reduce(|| 0.0, f64::max)
}

pub fn gaussian(ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let coarse = PhaseGrid::new(2, 16, 4.0)?;
    let fine = PhaseGrid::new(2, 32, 4.0)?;

    // (a) unit modulus: only ν = 0 survives
    let mut off_zero = 0.0f64;
    for theta in [0.0, 0.7, 1.9, -2.5] {
        let g = GaussianSymbol::new(1.0, theta)?;
        for nu in 1..=DECAY_NU_MAX {
            off_zero = off_zero.max(coefficient_peak(&g, nu, coarse, 256));
        }
    }
    checks.push(Check::at_most("kappa0_max_nonzero_mode", off_zero, 1e-12, "gamma = 1, nu = 1..12"));

    // (b) decay rate under refinement
    let g = GaussianSymbol::from_omega(ctx.omega.omega1)?;
    let rate = fitted_decay_rate(&g, coarse, 256);
    let refined = fitted_decay_rate(&g, fine, 512);
    checks.push(Check::at_least("decay_rate", rate, f64::MIN_POSITIVE, "fit over even nu in 0..12"));
    checks.push(Check::at_most(
        "decay_rate_refinement_change",
        (rate - refined).abs() / refined.abs(),
        0.05,
        "grid 16 -> 32 points, 256 -> 512 angular nodes",
    ));
    checks.push(Check::info("decay_rate_refined", refined, ""));
    checks.push(Check::info("decay_rate_predicted", g.predicted_decay_rate(), "closed-form rate"));

    // (c) uniform bound as stated, and the provable one
    let samples = [
        GaussianSymbol::new(1.0, 0.3)?,
        GaussianSymbol::from_omega(ctx.omega.omega1)?,
        GaussianSymbol::from_omega(ctx.omega.omega2)?,
    ];
    let literal = samples.iter().map(|g| bound_ratio(g, coarse, 1.0)).fold(0.0, f64::max);
    let corrected = samples.iter().map(|g| bound_ratio(g, coarse, 2.0)).fold(0.0, f64::max);
    checks.push(Check::at_most(
        "uniform_bound_ratio_literal",
        literal,
        1.0,
        "max |c_nu(s)| / ((1/pi) e^{-|s|^2/D})",
    ));
    checks.push(Check::at_most(
        "uniform_bound_ratio_2d",
        corrected,
        1.0 + 1e-12,
        "max |c_nu(s)| / ((1/pi) e^{-|s|^2/(2D)})",
    ));
    Ok(SuiteReport::new("gaussian", ctx.seed, checks))
}
