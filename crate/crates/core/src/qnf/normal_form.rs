//! Order-by-order quantum normal form.
//!
//! With `H = P₀ + εF₀` and generator `W = Σ_s ε^s W_s`, the conjugated
//! operator is `Σ_l H_l`, `H_l = [W, H_{l−1}]/(iħ l)`. Collecting powers of
//! ε, the order-`s` coefficient of `H_l` is
//!
//! `H_l[s] = (1/l) Σ_{j=1}^{s−l+1} [W_j, H_{l−1}[s−j]]/(iħ)`.
//!
//! The unknown `W_s` enters order `s` only through `[W_s, P₀]/(iħ)`, so the
//! remaining sum `F_s` is split by the homological equation into `W_s` and the
//! diagonal `Z_s`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::{FockTruncation, GradedMatrix};
use super::homological::homological_solve_matrix;
use super::weyl::{p0_eigenvalue, p0_matrix};
use crate::error::{Error, Result};
use crate::freq::FrequencyPair;

pub fn commutator_over_ihbar(a: &GradedMatrix, b: &GradedMatrix, hbar: f64) -> Result<GradedMatrix> {
    if hbar == 0.0 {
        return Err(Error::ZeroHbar);
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParams(format!("hbar must be positive, got {hbar}")));
    }
    Ok(a.commutator(b)?.scale(1.0 / (Complex64::i() * hbar)))
}

/// Depth of the boundary shell whose diagonal data at order `P` can see the
/// truncation: a closed path of `P` steps of size at most `B` strays at most
/// `⌊P/2⌋ B` from its start.
pub fn contamination_depth(order: usize, bandwidth: usize) -> usize {
    order / 2 * bandwidth
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFormSeries {
    pub omega: FrequencyPair,
    pub hbar: f64,
    pub truncation: FockTruncation,
    pub bandwidth: usize,
    pub contamination_depth: usize,
    /// `orders[p-1][index(n)] = 𝒩_p(nħ, ħ)`.
    pub orders: Vec<Vec<Complex64>>,
    pub remainder_norms: Vec<f64>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub mu: Option<f64>,
    /// `None` stands for an unbounded radius (`‖f₀‖ = 0`).
    pub epsilon_star: Option<f64>,
}

impl NormalFormSeries {
    pub fn max_order(&self) -> usize {
        self.orders.len()
    }

    pub fn check_point(&self, n: [usize; 2]) -> Result<()> {
        if !self.truncation.is_interior(n, self.contamination_depth) {
            return Err(Error::Contamination {
                point: n,
                depth: self.contamination_depth,
                n_max: self.truncation.n_max,
            });
        }
        Ok(())
    }

    /// `𝒩_p(nħ, ħ)`, `p ≥ 1`.
    pub fn coefficient(&self, n: [usize; 2], p: usize) -> Result<Complex64> {
        self.check_point(n)?;
        if p == 0 || p > self.orders.len() {
            return Err(Error::InvalidParams(format!(
                "order {p} outside 1..={}",
                self.orders.len()
            )));
        }
        Ok(self.orders[p - 1][self.truncation.index(n)])
    }

    /// Reliable lattice points with their per-order data, keyed `"n1,n2"`.
    pub fn table(&self) -> BTreeMap<String, Vec<[f64; 2]>> {
        let t = self.truncation;
        (0..t.dim())
            .map(|i| t.point(i))
            .filter(|n| t.is_interior(*n, self.contamination_depth))
            .map(|n| {
                let vals = self
                    .orders
                    .iter()
                    .map(|o| {
                        let v = o[t.index(n)];
                        [v.re, v.im]
                    })
                    .collect();
                (format!("{},{}", n[0], n[1]), vals)
            })
            .collect()
    }

    /// Attaches `μ` (at `epsilon`) and `ε*` from the symbol norm of `f₀`.
    pub fn with_radius(mut self, f0_norm: f64, sigma: f64, rho: f64, epsilon: f64) -> Result<Self> {
        let (mu, eps_star) = mu_and_radius(f0_norm, sigma, epsilon)?;
        self.sigma = Some(sigma);
        self.rho = Some(rho);
        self.mu = Some(mu);
        self.epsilon_star = eps_star.is_finite().then_some(eps_star);
        Ok(self)
    }
}

pub fn normal_form_orders(
    f0: &GradedMatrix,
    omega: &FrequencyPair,
    hbar: f64,
    max_order: usize,
) -> Result<NormalFormSeries> {
    if hbar == 0.0 {
        return Err(Error::ZeroHbar);
    }
    if max_order == 0 {
        return Err(Error::InvalidParams("max order must be >= 1".into()));
    }
    let t = f0.truncation;
    let depth = contamination_depth(max_order, f0.bandwidth);
    if depth > t.n_max {
        return Err(Error::Truncation(format!(
            "contamination depth {depth} exceeds n_max = {}; no reliable lattice point",
            t.n_max
        )));
    }
    let p0 = p0_matrix(t, omega, hbar);
    // h[l][s]: order-s coefficient of H_l; only s >= l is populated
    let mut h: Vec<Vec<Option<GradedMatrix>>> = vec![vec![None; max_order + 1]; max_order + 1];
    h[0][0] = Some(p0.clone());
    h[0][1] = Some(f0.clone());
    let mut gens: Vec<GradedMatrix> = vec![GradedMatrix::zeros(t)]; // W_0 unused
    let mut orders = Vec::with_capacity(max_order);

    for s in 1..=max_order {
        let mut f_s = h[0][s].clone().unwrap_or_else(|| GradedMatrix::zeros(t));
        for l in 1..=s {
            let mut acc = GradedMatrix::zeros(t);
            for j in 1..=(s - l + 1) {
                if l == 1 && j == s {
                    continue; // unknown W_s
                }
                if let Some(prev) = &h[l - 1][s - j] {
                    acc.add_assign(&commutator_over_ihbar(&gens[j], prev, hbar)?)?;
                }
            }
            let acc = acc.scale(Complex64::new(1.0 / l as f64, 0.0));
            f_s.add_assign(&acc)?;
            h[l][s] = Some(acc);
        }
        let (w_s, z_s) = homological_solve_matrix(&f_s, omega, hbar)?;
        let fresh = commutator_over_ihbar(&w_s, &p0, hbar)?;
        if let Some(h1) = h[1][s].as_mut() {
            h1.add_assign(&fresh)?;
        }
        orders.push(z_s.diagonal());
        gens.push(w_s);
    }

    Ok(NormalFormSeries {
        omega: *omega,
        hbar,
        truncation: t,
        bandwidth: f0.bandwidth,
        contamination_depth: depth,
        orders,
        remainder_norms: Vec::new(),
        sigma: None,
        rho: None,
        mu: None,
        epsilon_star: None,
    })
}

/// `p₀(n) + Σ_{p ≤ P} 𝒩_p ε^p` with the individual terms.
pub fn eigenvalue_series(
    nf: &NormalFormSeries,
    n: [usize; 2],
    epsilon: f64,
) -> Result<(Complex64, Vec<Complex64>)> {
    nf.check_point(n)?;
    let mut terms = Vec::with_capacity(nf.orders.len());
    let mut value = p0_eigenvalue(n, &nf.omega, nf.hbar);
    for p in 1..=nf.orders.len() {
        let term = nf.orders[p - 1][nf.truncation.index(n)] * epsilon.powi(p as i32);
        value += term;
        terms.push(term);
    }
    Ok((value, terms))
}

/// `μ = 4ε‖f₀‖/σ` and `ε* = σ/(16‖f₀‖)`; `ε* = ∞` when `‖f₀‖ = 0`.
pub fn mu_and_radius(f0_norm: f64, sigma: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
    }
    if !(f0_norm >= 0.0 && f0_norm.is_finite()) {
        return Err(Error::InvalidParams(format!("norm must be finite and >= 0, got {f0_norm}")));
    }
    let mu = 4.0 * epsilon * f0_norm / sigma;
    let eps_star = if f0_norm == 0.0 {
        f64::INFINITY
    } else {
        sigma / (16.0 * f0_norm)
    };
    Ok((mu, eps_star))
}

/// Radius of convergence from a least-squares fit of `log|𝒩_p|` against `p`
/// over `p = first..=P`. Orders that vanish identically are skipped.
pub fn ratio_test_radius(nf: &NormalFormSeries, n: [usize; 2], first: usize) -> Result<f64> {
    nf.check_point(n)?;
    let pts: Vec<(f64, f64)> = (first..=nf.orders.len())
        .filter_map(|p| {
            let v = nf.orders[p - 1][nf.truncation.index(n)].norm();
            (v > 0.0).then(|| (p as f64, v.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidParams("need two nonzero orders for a ratio fit".into()));
    }
    let (slope, _) = crate::stats::linear_fit(&pts);
    Ok((-slope).exp())
}
