//! Sparse polynomials in four variables with generic coefficients.
//!
//! Exponents are ordered `[x₁, ξ₁, x₂, ξ₂]`; the classical normal form reuses
//! the same container for `[z₁, w₁, z₂, w₂]`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::symcalc::PhasePoint;

pub type Exponents = [u32; 4];

pub trait Coefficient:
    Clone
    + PartialEq
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn from_u32(k: u32) -> Self;
}

impl Coefficient for Complex64 {
    fn from_u32(k: u32) -> Self {
        Complex64::new(k as f64, 0.0)
    }
}

#[cfg(test)]
impl Coefficient for num_complex::Complex<num_rational::Ratio<i64>> {
    fn from_u32(k: u32) -> Self {
        num_complex::Complex::new(num_rational::Ratio::from_integer(k as i64), Zero::zero())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPolynomial<T = Complex64> {
    terms: BTreeMap<Exponents, T>,
}

impl<T: Coefficient> Default for ClassicalPolynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coefficient> ClassicalPolynomial<T> {
    pub fn zero() -> Self {
        ClassicalPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exponents: Exponents, coefficient: T) -> Self {
        let mut p = Self::zero();
        p.add_term(exponents, coefficient);
        p
    }

    pub fn constant(c: T) -> Self {
        Self::monomial([0; 4], c)
    }

    /// The `k`-th coordinate function.
    pub fn variable(k: usize) -> Self {
        let mut e = [0; 4];
        e[k] = 1;
        Self::monomial(e, T::one())
    }

    pub fn add_term(&mut self, exponents: Exponents, coefficient: T) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents).or_insert_with(T::zero);
        *entry = entry.clone() + coefficient;
        if entry.is_zero() {
            self.terms.remove(&exponents);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponents) -> T {
        self.terms.get(e).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, c: T) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(T::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = *e;
            d[var] -= 1;
            out.add_term(d, c.clone() * T::from_u32(e[var]));
        }
        out
    }

    /// Keeps the terms for which `keep(exponents)` holds.
    pub fn filter(&self, keep: impl Fn(&Exponents) -> bool) -> Self {
        ClassicalPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Replaces variable `k` by `images[k]`.
    pub fn substitute(&self, images: &[Self; 4]) -> Self {
        let mut powers: Vec<Vec<Self>> = images.iter().map(|p| vec![Self::constant(T::one()), p.clone()]).collect();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            for k in 0..4 {
                let need = e[k] as usize;
                while powers[k].len() <= need {
                    let next = powers[k].last().expect("seeded").mul(&images[k]);
                    powers[k].push(next);
                }
                term = term.mul(&powers[k][need]);
            }
            out = out.add(&term);
        }
        out
    }
}

/// `Σ_k ∂_{ξ_k} f ∂_{x_k} g − ∂_{x_k} f ∂_{ξ_k} g`, variables `[x₁, ξ₁, x₂, ξ₂]`.
pub fn poisson_bracket<T: Coefficient>(
    f: &ClassicalPolynomial<T>,
    g: &ClassicalPolynomial<T>,
) -> ClassicalPolynomial<T> {
    let mut out = ClassicalPolynomial::zero();
    for k in 0..2 {
        let (x, xi) = (2 * k, 2 * k + 1);
        out = out
            .add(&f.derivative(xi).mul(&g.derivative(x)))
            .sub(&f.derivative(x).mul(&g.derivative(xi)));
    }
    out
}

impl ClassicalPolynomial<Complex64> {
    /// Evaluates at a phase point ordered `(x₁, x₂, ξ₁, ξ₂)`.
    pub fn eval_phase(&self, u: &PhasePoint) -> Complex64 {
        let vars = [u[0], u[2], u[1], u[3]];
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for k in 0..4 {
                    v *= vars[k].powu(e[k]);
                }
                v
            })
            .sum()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops terms with modulus at most `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        self.filter_coeff(|c| c.norm() > tol)
    }

    fn filter_coeff(&self, keep: impl Fn(&Complex64) -> bool) -> Self {
        ClassicalPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| keep(c))
                .map(|(e, c)| (*e, *c))
                .collect(),
        }
    }
}

/// One term of a polynomial in serialized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialTerm {
    /// `[x₁, ξ₁, x₂, ξ₂]` powers.
    pub exponents: Exponents,
    /// `[re, im]`.
    pub coefficient: [f64; 2],
}

impl Serialize for ClassicalPolynomial<Complex64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<PolynomialTerm> = self
            .terms
            .iter()
            .map(|(e, c)| PolynomialTerm {
                exponents: *e,
                coefficient: [c.re, c.im],
            })
            .collect();
        list.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassicalPolynomial<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let list = Vec::<PolynomialTerm>::deserialize(d)?;
        let mut p = ClassicalPolynomial::zero();
        for t in list {
            p.add_term(t.exponents, Complex64::new(t.coefficient[0], t.coefficient[1]));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    type Exact = num_complex::Complex<Ratio<i64>>;

    fn q(re: i64, im: i64) -> Exact {
        Exact::new(Ratio::from_integer(re), Ratio::from_integer(im))
    }

    fn random_poly(seed: &[(u8, i8, i8)]) -> ClassicalPolynomial<Exact> {
        let mut p = ClassicalPolynomial::zero();
        for &(code, re, im) in seed {
            let e = [
                (code % 3) as u32,
                ((code / 3) % 3) as u32,
                ((code / 9) % 3) as u32,
                ((code / 27) % 3) as u32,
            ];
            p.add_term(e, q(re as i64, im as i64));
        }
        p
    }

    #[test]
    fn canonical_pair() {
        let x = ClassicalPolynomial::<Complex64>::variable(0);
        let xi = ClassicalPolynomial::<Complex64>::variable(1);
        // {ξ, x} = 1 in this convention
        assert_eq!(poisson_bracket(&xi, &x), ClassicalPolynomial::constant(Complex64::new(1.0, 0.0)));
        assert!(poisson_bracket(&x, &x).is_zero());
    }

    #[test]
    fn substitution_and_eval() {
        let p = ClassicalPolynomial::monomial([2, 1, 0, 0], Complex64::new(2.0, 0.0));
        let images = [
            ClassicalPolynomial::variable(0).add(&ClassicalPolynomial::variable(1)),
            ClassicalPolynomial::variable(1),
            ClassicalPolynomial::variable(2),
            ClassicalPolynomial::variable(3),
        ];
        let s = p.substitute(&images);
        let u: PhasePoint = [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.5, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let want = 2.0 * (0.5f64 - 1.5).powi(2) * -1.5;
        assert!((s.eval_phase(&u) - want).norm() < 1e-14);
        assert_eq!(s.degree(), 3);
    }

    proptest! {
        #[test]
        fn jacobi_identity_exact(
            a in proptest::collection::vec((0u8..81, -3i8..4, -3i8..4), 1..4),
            b in proptest::collection::vec((0u8..81, -3i8..4, -3i8..4), 1..4),
            c in proptest::collection::vec((0u8..81, -3i8..4, -3i8..4), 1..4),
        ) {
            let (f, g, h) = (random_poly(&a), random_poly(&b), random_poly(&c));
            let j = poisson_bracket(&f, &poisson_bracket(&g, &h))
                .add(&poisson_bracket(&g, &poisson_bracket(&h, &f)))
                .add(&poisson_bracket(&h, &poisson_bracket(&f, &g)));
            prop_assert!(j.is_zero());
            prop_assert!(poisson_bracket(&f, &f).is_zero());
        }
    }
}
