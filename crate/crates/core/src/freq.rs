//! Complex frequency pairs, the admissible domain Γ and the large-denominator
//! constant.
//!
//! For ω = (a+ib, c+id) the domain is
//! `δ₁ ≤ |ω| ≤ δ₂` together with `|ac+bd| / (|ω₁||ω₂|) ≤ δ < 1`. Inside it the
//! lattice denominators `⟨ω,ν⟩` grow linearly in `|ν|`, with slope bounded
//! below by [`denominator_lower_bound`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPair {
    pub omega1: Complex64,
    pub omega2: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub delta1: f64,
    pub delta2: f64,
    pub delta: f64,
}

impl GammaParams {
    pub fn new(delta1: f64, delta2: f64, delta: f64) -> Result<Self> {
        let p = GammaParams {
            delta1,
            delta2,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta1 > 0.0 && self.delta1 <= self.delta2 && self.delta2.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "need 0 < delta1 <= delta2, got delta1 = {}, delta2 = {}",
                self.delta1, self.delta2
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < delta < 1, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

impl FrequencyPair {
    pub fn new(omega1: Complex64, omega2: Complex64) -> Self {
        FrequencyPair { omega1, omega2 }
    }

    pub fn from_parts(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(Complex64::new(a, b), Complex64::new(c, d))
    }

    pub fn component(&self, k: usize) -> Complex64 {
        match k {
            0 => self.omega1,
            1 => self.omega2,
            _ => panic!("mode index {k} out of range"),
        }
    }

    /// Real pairing `ac + bd` of the two frequencies viewed as vectors in ℝ².
    pub fn pairing(&self) -> f64 {
        self.omega1.re * self.omega2.re + self.omega1.im * self.omega2.im
    }

    /// Euclidean norm of the four real components.
    pub fn modulus(&self) -> f64 {
        (self.omega1.norm_sqr() + self.omega2.norm_sqr()).sqrt()
    }

    /// `|ac+bd| / (|ω₁||ω₂|)`.
    pub fn parallel_ratio(&self) -> f64 {
        self.pairing().abs() / (self.omega1.norm() * self.omega2.norm())
    }

    /// Complex-bilinear `ω₁ν₁ + ω₂ν₂` (no conjugation).
    pub fn dot(&self, nu: [i64; 2]) -> Complex64 {
        self.omega1 * nu[0] as f64 + self.omega2 * nu[1] as f64
    }

    pub fn dot_real(&self, n: [f64; 2]) -> Complex64 {
        self.omega1 * n[0] + self.omega2 * n[1]
    }

    fn check_real_parts(&self) -> Result<()> {
        if self.omega1.re == 0.0 {
            return Err(Error::VanishingRealPart { which: "omega1" });
        }
        if self.omega2.re == 0.0 {
            return Err(Error::VanishingRealPart { which: "omega2" });
        }
        Ok(())
    }
}

/// Membership in Γ. Boundaries are inclusive and compared without tolerance.
pub fn in_gamma(omega: &FrequencyPair, params: &GammaParams) -> Result<bool> {
    params.validate()?;
    omega.check_real_parts()?;
    let m = omega.modulus();
    Ok(params.delta1 <= m && m <= params.delta2 && omega.parallel_ratio() <= params.delta)
}

/// Componentwise multiplication by `i`.
pub fn rotate_i(omega: &FrequencyPair) -> FrequencyPair {
    FrequencyPair::new(I * omega.omega1, I * omega.omega2)
}

/// Exact minimum over the unit circle of `|ω₁ cos θ + ω₂ sin θ|`.
///
/// Writing `F(θ) = M + D cos 2θ + P sin 2θ` with `M = (|ω₁|²+|ω₂|²)/2`,
/// `D = (|ω₁|²−|ω₂|²)/2` and `P = ⟨ω₁,ω₂⟩`, the minimum of `F` is
/// `M − √(D²+P²)`; the constant is its square root.
pub fn denominator_lower_bound(omega: &FrequencyPair) -> Result<f64> {
    let n1 = omega.omega1.norm_sqr();
    let n2 = omega.omega2.norm_sqr();
    let mean = 0.5 * (n1 + n2);
    let half_diff = 0.5 * (n1 - n2);
    let p = omega.pairing();
    let amp = half_diff.hypot(p);
    let gap = mean - amp;
    // cancellation guard: a relative gap at roundoff level is real-proportional
    if !(gap > mean * 1e-14) {
        return Err(Error::DegenerateFrequency(format!(
            "min |omega1 cos t + omega2 sin t|^2 = {gap:e} <= 0 for omega = {omega:?}"
        )));
    }
    Ok(gap.sqrt())
}

/// The homological denominator `i⟨ω,ν⟩`.
pub fn small_denominator(omega: &FrequencyPair, nu: [i64; 2]) -> Result<Complex64> {
    if nu == [0, 0] {
        return Err(Error::ZeroIndex);
    }
    Ok(I * omega.dot(nu))
}

/// Lattice minimum of `|⟨ω,ν⟩| / ‖ν‖₂` over `0 < |ν|_∞ ≤ range`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LatticeAudit {
    pub range: i64,
    pub minimum: f64,
    pub argmin: [i64; 2],
    pub closed_form: f64,
}

impl LatticeAudit {
    pub fn relative_excess(&self) -> f64 {
        (self.minimum - self.closed_form) / self.closed_form
    }
}

pub fn lattice_audit(omega: &FrequencyPair, range: i64) -> Result<LatticeAudit> {
    let closed_form = denominator_lower_bound(omega)?;
    let mut minimum = f64::INFINITY;
    let mut argmin = [0, 0];
    for n1 in -range..=range {
        for n2 in -range..=range {
            if n1 == 0 && n2 == 0 {
                continue;
            }
            let len = ((n1 * n1 + n2 * n2) as f64).sqrt();
            let r = omega.dot([n1, n2]).norm() / len;
            if r < minimum {
                minimum = r;
                argmin = [n1, n2];
            }
        }
    }
    Ok(LatticeAudit {
        range,
        minimum,
        argmin,
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> FrequencyPair {
        FrequencyPair::from_parts(1.0, 1.0, 1.0, -2.0)
    }

    #[test]
    fn membership_examples() {
        let p = GammaParams::new(0.1, 10.0, 0.5).unwrap();
        let w = sample();
        assert!((w.parallel_ratio() - 1.0 / 10f64.sqrt()).abs() < 1e-15);
        assert!(in_gamma(&w, &p).unwrap());

        let orth = FrequencyPair::from_parts(1.0, 1.0, -1.0, 1.0);
        assert_eq!(orth.parallel_ratio(), 0.0);
        assert!(in_gamma(&orth, &GammaParams::new(0.1, 10.0, 1e-9).unwrap()).unwrap());
        assert!(!in_gamma(&orth, &GammaParams::new(0.1, 1.5, 0.5).unwrap()).unwrap());

        let real = FrequencyPair::from_parts(1.0, 0.0, 2.0, 0.0);
        assert_eq!(real.parallel_ratio(), 1.0);
        assert!(!in_gamma(&real, &GammaParams::new(0.1, 10.0, 0.999).unwrap()).unwrap());
    }

    #[test]
    fn vanishing_real_part_is_rejected() {
        let p = GammaParams::new(0.1, 10.0, 0.5).unwrap();
        let w = FrequencyPair::from_parts(0.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            in_gamma(&w, &p),
            Err(Error::VanishingRealPart { which: "omega1" })
        ));
        assert!(GammaParams::new(2.0, 1.0, 0.5).is_err());
        assert!(GammaParams::new(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn rotation_examples() {
        let r = rotate_i(&sample());
        assert_eq!(r.omega1, Complex64::new(-1.0, 1.0));
        assert_eq!(r.omega2, Complex64::new(2.0, 1.0));
        assert_eq!(r.omega1.norm(), sample().omega1.norm());
        assert_eq!(r.pairing(), sample().pairing());
    }

    #[test]
    fn lower_bound_equal_moduli() {
        let w = FrequencyPair::from_parts(1.0, 1.0, 1.0, -1.0);
        let c = denominator_lower_bound(&w).unwrap();
        assert!((c - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_matches_brute_force_circle() {
        let w = sample();
        let n = 1_000_000;
        let mut best = f64::INFINITY;
        for k in 0..n {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            best = best.min((w.omega1 * t.cos() + w.omega2 * t.sin()).norm());
        }
        let c = denominator_lower_bound(&w).unwrap();
        assert!(c <= best + 1e-12);
        assert!((best - c) / c < 1e-9, "closed form {c} vs grid {best}");
    }

    #[test]
    fn parallel_frequencies_are_degenerate() {
        let w = FrequencyPair::from_parts(1.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            denominator_lower_bound(&w),
            Err(Error::DegenerateFrequency(_))
        ));
    }

    #[test]
    fn small_denominator_examples() {
        let w = sample();
        assert_eq!(small_denominator(&w, [1, 0]).unwrap(), Complex64::new(-1.0, 1.0));
        let d = small_denominator(&w, [1, 1]).unwrap();
        assert_eq!(d, Complex64::new(1.0, 2.0));
        let c = denominator_lower_bound(&w).unwrap();
        assert!(d.norm() >= c * 2f64.sqrt());
        assert!(matches!(small_denominator(&w, [0, 0]), Err(Error::ZeroIndex)));
    }

    #[test]
    fn lattice_minimum_is_close_to_continuum() {
        let audit = lattice_audit(&sample(), 200).unwrap();
        assert!(audit.minimum >= audit.closed_form * (1.0 - 1e-12));
        assert!(audit.relative_excess() < 0.05);
    }

    proptest! {
        #[test]
        fn rotation_preserves_bound(a in 0.2f64..3.0, b in -3.0f64..3.0, c in -3.0f64..-0.2, d in -3.0f64..3.0) {
            let w = FrequencyPair::from_parts(a, b, c, d);
            prop_assume!(w.parallel_ratio() < 0.99);
            let c0 = denominator_lower_bound(&w).unwrap();
            let c1 = denominator_lower_bound(&rotate_i(&w)).unwrap();
            prop_assert!((c0 - c1).abs() <= 1e-12 * c0.max(1.0));
        }

        #[test]
        fn denominators_dominate_bound(a in 0.2f64..3.0, b in -3.0f64..3.0, c in 0.2f64..3.0, d in -3.0f64..3.0,
                                       n1 in -200i64..=200, n2 in -200i64..=200) {
            let w = FrequencyPair::from_parts(a, b, c, d);
            prop_assume!(w.parallel_ratio() < 0.99);
            prop_assume!(n1 != 0 || n2 != 0);
            let cd = denominator_lower_bound(&w).unwrap();
            let len = ((n1 * n1 + n2 * n2) as f64).sqrt();
            prop_assert!(w.dot([n1, n2]).norm() >= cd * len * (1.0 - 1e-12));
        }
    }
}
