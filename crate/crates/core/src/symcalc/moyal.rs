//! The Moyal bracket as a twisted convolution on the Fourier side.
//!
//! With `s = (v, w)` split into the duals of `x` and `ξ`, the wedge is
//! `a ∧ b = ⟨w_a, v_b⟩ − ⟨v_a, w_b⟩`, and
//!
//! `{g,g'}_M^(s) = c_d (2/ħ) Σ_a ĝ(a) ĝ'(s−a) sin(ħ (s−a)∧a / 2) h^d`
//!
//! with `c_d = (2π)^{-d/2}` from the unitary transform. At `ħ = 0` the sine
//! weight becomes `(s−a)∧a`, the transform of the Poisson bracket
//! `Σ ∂_ξ g ∂_x g' − ∂_x g ∂_ξ g'`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{FourierSymbol, PhaseGrid};
use super::norms::{gradient_sigma_norm, sigma_norm};
use crate::error::{Error, Result};

/// Default cap on `M^{2d}` kernel evaluations per bracket.
pub const DEFAULT_BRACKET_BUDGET: u64 = 500_000_000;

pub fn wedge(d: usize, a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let half = d / 2;
    (0..half).map(|k| a[half + k] * b[k] - a[k] * b[half + k]).sum()
}

fn bracket_cost(grid: &PhaseGrid) -> u64 {
    (grid.points_per_axis as u64).pow(2 * grid.dimension as u32)
}

pub fn moyal_bracket(g: &FourierSymbol, gp: &FourierSymbol, hbar: f64) -> Result<FourierSymbol> {
    moyal_bracket_with_budget(g, gp, hbar, DEFAULT_BRACKET_BUDGET)
}

pub fn moyal_bracket_with_budget(
    g: &FourierSymbol,
    gp: &FourierSymbol,
    hbar: f64,
    budget: u64,
) -> Result<FourierSymbol> {
    g.grid.ensure_same(&gp.grid)?;
    if !(hbar >= 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParams(format!("hbar must be >= 0, got {hbar}")));
    }
    let grid = g.grid;
    let cost = bracket_cost(&grid);
    if cost > budget {
        return Err(Error::Budget {
            what: "moyal bracket kernel evaluations",
            needed: cost,
            budget,
        });
    }
    let d = grid.dimension;
    let m = grid.points_per_axis as isize;
    let half = m / 2;
    let nodes: Vec<[f64; 4]> = (0..grid.len()).map(|i| grid.node(i)).collect();
    let multis: Vec<[usize; 4]> = (0..grid.len()).map(|i| grid.multi_index(i)).collect();
    let weight = grid.transform_prefactor() * grid.cell_volume();
    let zero = Complex64::new(0.0, 0.0);

    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|out| {
            let jo = multis[out];
            let mut terms: Vec<Complex64> = Vec::new();
            for a in 0..grid.len() {
                let ja = multis[a];
                // index of b = s − a; the origin sits at M/2 on every axis
                let mut b = 0usize;
                let mut inside = true;
                for k in 0..d {
                    let jb = jo[k] as isize - ja[k] as isize + half;
                    if jb < 0 || jb >= m {
                        inside = false;
                        break;
                    }
                    b = b * m as usize + jb as usize;
                }
                // pair (a, b) with (b, a); a == b has zero wedge
                if !inside || b <= a {
                    continue;
                }
                let w = wedge(d, &nodes[b], &nodes[a]);
                let kernel = if hbar == 0.0 {
                    w
                } else {
                    2.0 / hbar * (hbar * w / 2.0).sin()
                };
                let anti = g.values[a] * gp.values[b] - g.values[b] * gp.values[a];
                if anti != zero {
                    terms.push(anti * kernel);
                }
            }
            complex_pairwise_sum(&terms) * weight
        })
        .collect();
    FourierSymbol::new(
        grid,
        values,
        format!("{{{}, {}}}_M", g.label, gp.label),
    )
}

pub(crate) fn complex_pairwise_sum(xs: &[Complex64]) -> Complex64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    complex_pairwise_sum(&xs[..mid]) + complex_pairwise_sum(&xs[mid..])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LieIterates {
    pub terms: Vec<FourierSymbol>,
    pub norms: Vec<f64>,
    /// `(4‖∇w‖_σ/σ)^r ‖g‖_σ`.
    pub bounds: Vec<f64>,
}

/// `g_0 = g`, `g_r = {w, g_{r−1}}_M / r`.
pub fn lie_iterates(
    g: &FourierSymbol,
    w: &FourierSymbol,
    hbar: f64,
    r_max: usize,
    sigma: f64,
) -> Result<LieIterates> {
    lie_iterates_with_budget(g, w, hbar, r_max, sigma, DEFAULT_BRACKET_BUDGET)
}

pub fn lie_iterates_with_budget(
    g: &FourierSymbol,
    w: &FourierSymbol,
    hbar: f64,
    r_max: usize,
    sigma: f64,
    budget: u64,
) -> Result<LieIterates> {
    g.grid.ensure_same(&w.grid)?;
    let total = bracket_cost(&g.grid).saturating_mul(r_max as u64);
    if total > budget {
        return Err(Error::Budget {
            what: "nested moyal brackets",
            needed: total,
            budget,
        });
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
    }
    let ratio = 4.0 * gradient_sigma_norm(w, sigma)? / sigma;
    let g_norm = sigma_norm(g, sigma)?;
    let mut terms = vec![g.clone()];
    let mut norms = vec![g_norm];
    let mut bounds = vec![g_norm];
    for r in 1..=r_max {
        let next = moyal_bracket_with_budget(w, &terms[r - 1], hbar, u64::MAX)?
            .scale(Complex64::new(1.0 / r as f64, 0.0));
        norms.push(sigma_norm(&next, sigma)?);
        bounds.push(ratio.powi(r as i32) * g_norm);
        terms.push(next);
    }
    Ok(LieIterates {
        terms,
        norms,
        bounds,
    })
}
