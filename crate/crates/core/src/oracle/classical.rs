//! Classical Birkhoff normal form of `p₀ + εF` for polynomial `F`.
//!
//! Works in `z_k = (ω_k x_k + iξ_k)/√(2ω_k)`, `w_k = (ω_k x_k − iξ_k)/√(2ω_k)`,
//! where `p₀ = Σ ω_k z_k w_k`, `I_k = z_k w_k` and the canonical bracket is
//! `{f,g} = −i Σ_k (∂_{z_k} f ∂_{w_k} g − ∂_{w_k} f ∂_{z_k} g)`. A monomial
//! `z^α w^β` satisfies `{z^α w^β, p₀} = i⟨ω, β−α⟩ z^α w^β`. The ε-order
//! recursion is the one used at operator level with `[·,·]/(iħ)` replaced by
//! this bracket.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::ClassicalPolynomial;
use crate::error::{Error, Result};
use crate::freq::FrequencyPair;
use crate::qnf::weyl::to_ladder_variables;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Polynomial in the actions `(I₁, I₂)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActionPolynomial {
    terms: BTreeMap<[u32; 2], Complex64>,
}

impl ActionPolynomial {
    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 2], &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: [u32; 2]) -> Complex64 {
        self.terms.get(&e).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, action: [f64; 2]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * action[0].powi(e[0] as i32) * action[1].powi(e[1] as i32))
            .sum()
    }

    /// Reads off the `z^a w^a` part of a polynomial in `[z₁, w₁, z₂, w₂]`.
    fn from_resonant(p: &ClassicalPolynomial) -> Self {
        let terms = p
            .terms()
            .filter(|(e, _)| e[0] == e[1] && e[2] == e[3])
            .map(|(e, c)| ([e[0], e[2]], *c))
            .collect();
        ActionPolynomial { terms }
    }
}

#[derive(Serialize, Deserialize)]
struct ActionTerm {
    exponents: [u32; 2],
    coefficient: [f64; 2],
}

impl Serialize for ActionPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms
            .iter()
            .map(|(e, c)| ActionTerm {
                exponents: *e,
                coefficient: [c.re, c.im],
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ActionPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let list = Vec::<ActionTerm>::deserialize(d)?;
        Ok(ActionPolynomial {
            terms: list
                .into_iter()
                .map(|t| (t.exponents, Complex64::new(t.coefficient[0], t.coefficient[1])))
                .collect(),
        })
    }
}

/// Canonical bracket in `[z₁, w₁, z₂, w₂]`.
pub fn canonical_bracket(f: &ClassicalPolynomial, g: &ClassicalPolynomial) -> ClassicalPolynomial {
    let mut out = ClassicalPolynomial::zero();
    for k in 0..2 {
        let (z, w) = (2 * k, 2 * k + 1);
        out = out
            .add(&f.derivative(z).mul(&g.derivative(w)))
            .sub(&f.derivative(w).mul(&g.derivative(z)));
    }
    out.scale(-I)
}

/// `Σ_k ω_k z_k w_k`.
pub fn p0_polynomial(omega: &FrequencyPair) -> ClassicalPolynomial {
    ClassicalPolynomial::monomial([1, 1, 0, 0], omega.omega1)
        .add(&ClassicalPolynomial::monomial([0, 0, 1, 1], omega.omega2))
}

/// Splits `F` into a generator `χ` with `{χ, p₀} + F = Z` and the resonant
/// part `Z`.
pub fn classical_homological(
    f: &ClassicalPolynomial,
    omega: &FrequencyPair,
) -> Result<(ClassicalPolynomial, ClassicalPolynomial)> {
    let mut chi = ClassicalPolynomial::zero();
    let mut z = ClassicalPolynomial::zero();
    for (e, c) in f.terms() {
        let nu = [e[1] as i64 - e[0] as i64, e[3] as i64 - e[2] as i64];
        if nu == [0, 0] {
            z.add_term(*e, *c);
            continue;
        }
        let den = I * omega.dot(nu);
        if den.norm() == 0.0 {
            return Err(Error::Resonant { nu });
        }
        chi.add_term(*e, -c / den);
    }
    Ok((chi, z))
}

/// `Y_1, …, Y_P` for a perturbation given in `(x₁, ξ₁, x₂, ξ₂)`.
pub fn classical_birkhoff(
    perturbation: &ClassicalPolynomial,
    omega: &FrequencyPair,
    max_order: usize,
) -> Result<Vec<ActionPolynomial>> {
    if max_order == 0 {
        return Err(Error::InvalidParams("max order must be >= 1".into()));
    }
    let f0 = to_ladder_variables(perturbation, omega);
    let mut h: Vec<Vec<ClassicalPolynomial>> = vec![vec![ClassicalPolynomial::zero(); max_order + 1]; max_order + 1];
    h[0][0] = p0_polynomial(omega);
    h[0][1] = f0;
    let mut gens = vec![ClassicalPolynomial::zero()];
    let mut out = Vec::with_capacity(max_order);
    for s in 1..=max_order {
        let mut f_s = h[0][s].clone();
        for l in 1..=s {
            let mut acc = ClassicalPolynomial::zero();
            for j in 1..=(s - l + 1) {
                if l == 1 && j == s {
                    continue;
                }
                acc = acc.add(&canonical_bracket(&gens[j], &h[l - 1][s - j]));
            }
            let acc = acc.scale(Complex64::new(1.0 / l as f64, 0.0));
            f_s = f_s.add(&acc);
            h[l][s] = acc;
        }
        let (chi, z) = classical_homological(&f_s, omega)?;
        // {χ_s, p₀} = Z_s − F_s
        h[1][s] = h[1][s].add(&z).sub(&f_s);
        out.push(ActionPolynomial::from_resonant(&z));
        gens.push(chi);
    }
    Ok(out)
}
