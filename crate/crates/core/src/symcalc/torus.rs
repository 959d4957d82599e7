//! The torus action generated by the complex harmonic flow, pullbacks along
//! it, and Fourier coefficients with respect to its angles.
//!
//! Phase points are ordered `(x₁, x₂, ξ₁, ξ₂)` and may be complex.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{FourierSymbol, PhaseGrid};
use crate::error::{Error, Result};
use crate::freq::FrequencyPair;

pub type PhasePoint = [Complex64; 4];

/// `Ψ_{φ,ω}`. Angles may be complex so that `φ = ωt` can be followed.
pub fn torus_action(omega: &FrequencyPair, phi: [Complex64; 2], u: &PhasePoint) -> PhasePoint {
    let mut out = *u;
    for k in 0..2 {
        let w = omega.component(k);
        let (s, c) = (phi[k].sin(), phi[k].cos());
        let (x, xi) = (u[k], u[2 + k]);
        out[k] = xi / w * s + x * c;
        out[2 + k] = xi * c - w * x * s;
    }
    out
}

/// `Ξ_{φ,ω} = Ψ_{iφ,iω}`.
pub fn hyperbolic_action(omega: &FrequencyPair, phi: [Complex64; 2], u: &PhasePoint) -> PhasePoint {
    let mut out = *u;
    for k in 0..2 {
        let w = omega.component(k);
        let (s, c) = (phi[k].sinh(), phi[k].cosh());
        let (x, xi) = (u[k], u[2 + k]);
        out[k] = x * c + xi / w * s;
        out[2 + k] = xi * c + w * x * s;
    }
    out
}

pub fn real_angles(phi: [f64; 2]) -> [Complex64; 2] {
    [Complex64::new(phi[0], 0.0), Complex64::new(phi[1], 0.0)]
}

/// A symbol that can be evaluated at (complex) phase points.
pub trait PhaseFunction: Sync {
    fn eval(&self, u: &PhasePoint) -> Complex64;
}

impl<F: Fn(&PhasePoint) -> Complex64 + Sync> PhaseFunction for F {
    fn eval(&self, u: &PhasePoint) -> Complex64 {
        self(u)
    }
}

/// `u ↦ f(Ψ u)` or `u ↦ f(Ξ u)` for fixed angles.
pub struct Pullback<'a, F: PhaseFunction + ?Sized> {
    f: &'a F,
    omega: FrequencyPair,
    phi: [Complex64; 2],
    hyperbolic: bool,
}

impl<F: PhaseFunction + ?Sized> PhaseFunction for Pullback<'_, F> {
    fn eval(&self, u: &PhasePoint) -> Complex64 {
        let v = if self.hyperbolic {
            hyperbolic_action(&self.omega, self.phi, u)
        } else {
            torus_action(&self.omega, self.phi, u)
        };
        self.f.eval(&v)
    }
}

pub fn torus_pullback<'a, F: PhaseFunction + ?Sized>(
    f: &'a F,
    omega: &FrequencyPair,
    phi: [f64; 2],
) -> Pullback<'a, F> {
    Pullback {
        f,
        omega: *omega,
        phi: real_angles(phi),
        hyperbolic: false,
    }
}

/// The caller is responsible for keeping `|φ|` inside the analyticity strip.
pub fn hyperbolic_pullback<'a, F: PhaseFunction + ?Sized>(
    f: &'a F,
    omega: &FrequencyPair,
    phi: [f64; 2],
) -> Pullback<'a, F> {
    Pullback {
        f,
        omega: *omega,
        phi: real_angles(phi),
        hyperbolic: true,
    }
}

/// A symbol whose pullbacks along the torus action have a known Fourier
/// transform.
pub trait TorusSymbol: PhaseFunction {
    /// `Some(k)` if the symbol depends on mode `k` only (sampled on a
    /// 2-dimensional grid over `(s_x, s_ξ)` of that mode), `None` for a
    /// genuinely two-mode symbol on a 4-dimensional grid.
    fn active_mode(&self) -> Option<usize>;

    /// Fourier transform of `u ↦ f(Ψ_{φ,ω} u)` at `s`.
    fn pullback_hat(&self, omega: &FrequencyPair, phi: [f64; 2], s: &[f64]) -> Result<Complex64>;

    /// `f(Ψ_{φ,ω} u)` for real angles.
    fn pullback_eval(&self, omega: &FrequencyPair, phi: [f64; 2], u: &PhasePoint) -> Complex64 {
        self.eval(&torus_action(omega, real_angles(phi), u))
    }
}

/// The family `{f_{ν,ω}}` for `|ν|_∞ ≤ nu_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusCoefficients {
    pub omega: FrequencyPair,
    pub nu_max: i64,
    pub active_mode: Option<usize>,
    #[serde(with = "coefficient_list")]
    pub coefficients: BTreeMap<[i64; 2], FourierSymbol>,
}

mod coefficient_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        nu: [i64; 2],
        symbol: FourierSymbol,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<[i64; 2], FourierSymbol>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<Entry> = map
            .iter()
            .map(|(nu, symbol)| Entry {
                nu: *nu,
                symbol: symbol.clone(),
            })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<[i64; 2], FourierSymbol>, D::Error> {
        let list = Vec::<Entry>::deserialize(d)?;
        Ok(list.into_iter().map(|e| (e.nu, e.symbol)).collect())
    }
}

pub fn nu_box(nu_max: i64) -> impl Iterator<Item = [i64; 2]> {
    (-nu_max..=nu_max).flat_map(move |a| (-nu_max..=nu_max).map(move |b| [a, b]))
}

impl TorusCoefficients {
    pub fn new(
        omega: FrequencyPair,
        nu_max: i64,
        active_mode: Option<usize>,
        coefficients: BTreeMap<[i64; 2], FourierSymbol>,
    ) -> Result<Self> {
        if nu_max < 1 {
            return Err(Error::InvalidParams(format!("nu_max must be positive, got {nu_max}")));
        }
        let expected = ((2 * nu_max + 1) * (2 * nu_max + 1)) as usize;
        if coefficients.len() != expected || nu_box(nu_max).any(|nu| !coefficients.contains_key(&nu))
        {
            return Err(Error::InvalidParams(
                "coefficient keys must be exactly the box |nu|_inf <= nu_max".into(),
            ));
        }
        let grid = coefficients[&[0, 0]].grid;
        for sym in coefficients.values() {
            grid.ensure_same(&sym.grid)?;
        }
        let want_dim = if active_mode.is_some() { 2 } else { 4 };
        if grid.dimension != want_dim {
            return Err(Error::GridMismatch(format!(
                "active mode {active_mode:?} needs a {want_dim}-dimensional grid"
            )));
        }
        Ok(TorusCoefficients {
            omega,
            nu_max,
            active_mode,
            coefficients,
        })
    }

    pub fn grid(&self) -> PhaseGrid {
        self.coefficients[&[0, 0]].grid
    }

    pub fn get(&self, nu: [i64; 2]) -> Option<&FourierSymbol> {
        self.coefficients.get(&nu)
    }

    /// Same keys and grid, every coefficient zero.
    pub fn zeros_like(&self) -> TorusCoefficients {
        let coefficients = self
            .coefficients
            .iter()
            .map(|(nu, s)| (*nu, FourierSymbol::zeros(s.grid, s.label.clone())))
            .collect();
        TorusCoefficients {
            coefficients,
            ..self.clone()
        }
    }

    /// Grid coordinates of a phase point.
    pub fn coordinates(&self, u: &PhasePoint) -> Vec<Complex64> {
        match self.active_mode {
            Some(k) => vec![u[k], u[2 + k]],
            None => u.to_vec(),
        }
    }

    /// `Σ_{|ν|_∞ ≤ k} f_ν(u)`.
    pub fn partial_sum(&self, u: &PhasePoint, k: i64) -> Complex64 {
        let z = self.coordinates(u);
        self.coefficients
            .iter()
            .filter(|(nu, _)| nu[0].abs().max(nu[1].abs()) <= k)
            .map(|(_, s)| s.eval_direct(&z))
            .sum()
    }

    pub fn eval(&self, u: &PhasePoint) -> Complex64 {
        self.partial_sum(u, self.nu_max)
    }
}

/// Share of the coefficient L¹ mass carried by the outermost shell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShellReport {
    pub shell_fraction: f64,
    pub threshold: f64,
    pub aliasing_warning: bool,
}

pub const DEFAULT_ALIASING_THRESHOLD: f64 = 1e-3;

/// Discrete Fourier quadrature over the torus angles, one DFT per grid node.
pub fn fourier_coefficients(
    f: &dyn TorusSymbol,
    omega: &FrequencyPair,
    nu_max: i64,
    angular_nodes: usize,
    grid: PhaseGrid,
    aliasing_threshold: f64,
) -> Result<(TorusCoefficients, ShellReport)> {
    grid.validate()?;
    if nu_max < 1 {
        return Err(Error::InvalidParams(format!("nu_max must be positive, got {nu_max}")));
    }
    if (angular_nodes as i64) < 4 * nu_max {
        return Err(Error::InvalidParams(format!(
            "angular_nodes = {angular_nodes} below 4 * nu_max = {}",
            4 * nu_max
        )));
    }
    let mode = f.active_mode();
    let want_dim = if mode.is_some() { 2 } else { 4 };
    if grid.dimension != want_dim {
        return Err(Error::GridMismatch(format!(
            "symbol with active mode {mode:?} needs a {want_dim}-dimensional grid"
        )));
    }
    let n = angular_nodes;
    let angles: Vec<f64> = (0..n)
        .map(|j| std::f64::consts::TAU * j as f64 / n as f64)
        .collect();
    let nus: Vec<i64> = (-nu_max..=nu_max).collect();
    let width = nus.len();
    // twiddle[a][j] = e^{-i ν_a φ_j} / N
    let twiddle: Vec<Vec<Complex64>> = nus
        .iter()
        .map(|&v| {
            angles
                .iter()
                .map(|&p| Complex64::from_polar(1.0 / n as f64, -(v as f64) * p))
                .collect()
        })
        .collect();

    // per node: row-major (ν₁, ν₂) table of coefficients
    let per_node: Vec<Result<Vec<Complex64>>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let node = grid.node(idx);
            let s = &node[..grid.dimension];
            let mut out = vec![Complex64::new(0.0, 0.0); width * width];
            match mode {
                Some(k) => {
                    let mut samples = Vec::with_capacity(n);
                    for &p in &angles {
                        let mut phi = [0.0; 2];
                        phi[k] = p;
                        samples.push(f.pullback_hat(omega, phi, s)?);
                    }
                    for a in 0..width {
                        let c: Complex64 =
                            samples.iter().zip(&twiddle[a]).map(|(x, t)| x * t).sum();
                        let (i1, i2) = if k == 0 { (a, nu_max as usize) } else { (nu_max as usize, a) };
                        out[i1 * width + i2] = c;
                    }
                }
                None => {
                    // partial transform over φ₂ first, then φ₁
                    let mut partial = vec![Complex64::new(0.0, 0.0); n * width];
                    for (j1, &p1) in angles.iter().enumerate() {
                        let mut samples = Vec::with_capacity(n);
                        for &p2 in &angles {
                            samples.push(f.pullback_hat(omega, [p1, p2], s)?);
                        }
                        for b in 0..width {
                            partial[j1 * width + b] =
                                samples.iter().zip(&twiddle[b]).map(|(x, t)| x * t).sum();
                        }
                    }
                    for a in 0..width {
                        for b in 0..width {
                            out[a * width + b] = (0..n)
                                .map(|j1| partial[j1 * width + b] * twiddle[a][j1])
                                .sum();
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let per_node: Vec<Vec<Complex64>> = per_node.into_iter().collect::<Result<_>>()?;

    let mut coefficients = BTreeMap::new();
    let mut shell_mass = 0.0;
    let mut total_mass = 0.0;
    for (a, &v1) in nus.iter().enumerate() {
        for (b, &v2) in nus.iter().enumerate() {
            let values: Vec<Complex64> = per_node.iter().map(|row| row[a * width + b]).collect();
            let mass: f64 = values.iter().map(|v| v.norm()).sum();
            total_mass += mass;
            if v1.abs().max(v2.abs()) == nu_max {
                shell_mass += mass;
            }
            let sym = FourierSymbol::new(grid, values, format!("coefficient nu=({v1},{v2})"))?;
            coefficients.insert([v1, v2], sym);
        }
    }
    let shell_fraction = if total_mass > 0.0 { shell_mass / total_mass } else { 0.0 };
    let report = ShellReport {
        shell_fraction,
        threshold: aliasing_threshold,
        aliasing_warning: shell_fraction > aliasing_threshold,
    };
    Ok((TorusCoefficients::new(*omega, nu_max, mode, coefficients)?, report))
}

/// Direct-space coefficient `f_{ν,ω}(u)` by angular quadrature of the pullback.
pub fn pointwise_coefficient(
    f: &dyn TorusSymbol,
    omega: &FrequencyPair,
    nu: [i64; 2],
    u: &PhasePoint,
    angular_nodes: usize,
) -> Complex64 {
    let n = angular_nodes;
    let step = std::f64::consts::TAU / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j1 in 0..n {
        for j2 in 0..n {
            let phi = [j1 as f64 * step, j2 as f64 * step];
            let phase = -(nu[0] as f64 * phi[0] + nu[1] as f64 * phi[1]);
            acc += f.pullback_eval(omega, phi, u) * Complex64::from_polar(1.0, phase);
        }
    }
    acc / (n * n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega() -> FrequencyPair {
        FrequencyPair::from_parts(1.0, 1.0, 1.0, -2.0)
    }

    fn point() -> PhasePoint {
        [
            Complex64::new(0.3, 0.0),
            Complex64::new(-1.1, 0.0),
            Complex64::new(0.8, 0.0),
            Complex64::new(0.25, 0.0),
        ]
    }

    fn p0(w: FrequencyPair) -> impl Fn(&PhasePoint) -> Complex64 {
        move |u: &PhasePoint| {
            (0..2)
                .map(|k| {
                    let wk = w.component(k);
                    (u[2 + k] * u[2 + k] + wk * wk * u[k] * u[k]) / 2.0
                })
                .sum()
        }
    }

    #[test]
    fn identity_and_periodicity() {
        let w = omega();
        let u = point();
        let id = torus_action(&w, real_angles([0.0, 0.0]), &u);
        assert_eq!(id, u);
        let a = torus_action(&w, real_angles([0.4, -1.3]), &u);
        let b = torus_action(&w, real_angles([0.4 + std::f64::consts::TAU, -1.3]), &u);
        for k in 0..4 {
            assert!((a[k] - b[k]).norm() < 1e-13);
        }
        assert_eq!(hyperbolic_action(&w, real_angles([0.0, 0.0]), &u), u);
    }

    #[test]
    fn harmonic_flow_preserves_p0() {
        let w = omega();
        let h = p0(w);
        let u = point();
        let base = h(&u);
        for phi in [[0.3, 0.0], [1.0, -2.0], [2.5, 0.7]] {
            let moved = torus_pullback(&h, &w, phi).eval(&u);
            assert!((moved - base).norm() < 1e-12 * base.norm());
        }
    }

    #[test]
    fn hyperbolic_is_rotated_torus_action() {
        let w = omega();
        let iw = crate::freq::rotate_i(&w);
        let u = point();
        let phi = [0.35, -0.2];
        let xi = hyperbolic_action(&w, real_angles(phi), &u);
        let psi = torus_action(
            &iw,
            [Complex64::new(0.0, phi[0]), Complex64::new(0.0, phi[1])],
            &u,
        );
        for k in 0..4 {
            assert!((xi[k] - psi[k]).norm() < 1e-14);
        }
        let real = FrequencyPair::from_parts(1.5, 0.0, 1.0, 0.0);
        let x0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut last = 1.0;
        for t in [0.1, 0.2, 0.4, 0.8] {
            let x = hyperbolic_action(&real, real_angles([t, 0.0]), &x0)[0].norm();
            assert!(x > last);
            last = x;
        }
    }

    struct Constant(Complex64);

    impl PhaseFunction for Constant {
        fn eval(&self, _: &PhasePoint) -> Complex64 {
            self.0
        }
    }

    impl TorusSymbol for Constant {
        fn active_mode(&self) -> Option<usize> {
            None
        }
        fn pullback_hat(&self, _: &FrequencyPair, _: [f64; 2], _: &[f64]) -> Result<Complex64> {
            Err(Error::InvalidParams("constant has no integrable transform".into()))
        }
    }

    #[test]
    fn constant_symbol_has_only_zero_mode() {
        let c = Constant(Complex64::new(2.0, -1.0));
        let w = omega();
        let u = point();
        assert!((pointwise_coefficient(&c, &w, [0, 0], &u, 8) - c.0).norm() < 1e-14);
        for nu in [[1, 0], [0, -1], [2, 3]] {
            assert!(pointwise_coefficient(&c, &w, nu, &u, 8).norm() < 1e-14);
        }
    }

    #[test]
    fn angular_node_margin_is_enforced() {
        let c = Constant(Complex64::new(1.0, 0.0));
        let g = PhaseGrid::new(4, 4, 1.0).unwrap();
        let r = fourier_coefficients(&c, &omega(), 4, 8, g, DEFAULT_ALIASING_THRESHOLD);
        assert!(matches!(r, Err(Error::InvalidParams(_))));
    }
}
