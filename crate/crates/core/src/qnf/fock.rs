//! Truncated two-mode Fock lattice and dense matrices graded by `ν = m − n`.
//!
//! Lattice point `n = (n₁, n₂)` has linear index `n₁ (N+1) + n₂`. Nothing
//! here assumes an inner product: for complex frequencies the ladder basis is
//! purely algebraic.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest lattice accepted without an explicit budget override.
pub const DEFAULT_LATTICE_BUDGET: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockTruncation {
    pub n_max: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        Self::with_budget(n_max, DEFAULT_LATTICE_BUDGET)
    }

    pub fn with_budget(n_max: usize, budget: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParams(format!("n_max must be >= 2, got {n_max}")));
        }
        let size = (n_max + 1) * (n_max + 1);
        if size > budget {
            return Err(Error::Budget {
                what: "Fock lattice size",
                needed: size as u64,
                budget: budget as u64,
            });
        }
        Ok(FockTruncation { n_max })
    }

    pub fn side(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        self.side() * self.side()
    }

    pub fn index(&self, n: [usize; 2]) -> usize {
        n[0] * self.side() + n[1]
    }

    pub fn point(&self, idx: usize) -> [usize; 2] {
        [idx / self.side(), idx % self.side()]
    }

    pub fn contains(&self, n: [usize; 2]) -> bool {
        n[0] <= self.n_max && n[1] <= self.n_max
    }

    pub fn grading(&self, row: usize, col: usize) -> [i64; 2] {
        let m = self.point(row);
        let n = self.point(col);
        [m[0] as i64 - n[0] as i64, m[1] as i64 - n[1] as i64]
    }

    /// Points whose distance to the truncation edge exceeds `depth`.
    pub fn is_interior(&self, n: [usize; 2], depth: usize) -> bool {
        n[0] + depth <= self.n_max && n[1] + depth <= self.n_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedMatrix {
    pub truncation: FockTruncation,
    /// Row-major, `dim × dim`.
    pub data: Vec<Complex64>,
    /// Largest `|ν|_∞` over nonzero entries.
    pub bandwidth: usize,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl GradedMatrix {
    pub fn zeros(truncation: FockTruncation) -> Self {
        GradedMatrix {
            truncation,
            data: vec![ZERO; truncation.dim() * truncation.dim()],
            bandwidth: 0,
        }
    }

    pub fn identity(truncation: FockTruncation) -> Self {
        Self::diagonal_from(truncation, |_| Complex64::new(1.0, 0.0))
    }

    pub fn diagonal_from(truncation: FockTruncation, f: impl Fn([usize; 2]) -> Complex64) -> Self {
        let mut m = Self::zeros(truncation);
        let dim = truncation.dim();
        for i in 0..dim {
            m.data[i * dim + i] = f(truncation.point(i));
        }
        m
    }

    pub fn from_fn(
        truncation: FockTruncation,
        f: impl Fn([usize; 2], [usize; 2]) -> Complex64 + Sync,
    ) -> Result<Self> {
        let dim = truncation.dim();
        let data: Vec<Complex64> = (0..dim * dim)
            .into_par_iter()
            .map(|k| f(truncation.point(k / dim), truncation.point(k % dim)))
            .collect();
        let mut m = GradedMatrix {
            truncation,
            data,
            bandwidth: 0,
        };
        m.check_finite()?;
        m.refresh_bandwidth();
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.truncation.dim()
    }

    fn check_finite(&self) -> Result<()> {
        if let Some(k) = self.data.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            let dim = self.dim();
            return Err(Error::NonConvergence(format!(
                "non-finite matrix entry at ({:?}, {:?})",
                self.truncation.point(k / dim),
                self.truncation.point(k % dim)
            )));
        }
        Ok(())
    }

    pub fn refresh_bandwidth(&mut self) {
        let dim = self.dim();
        let t = self.truncation;
        self.bandwidth = self
            .data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != ZERO)
            .map(|(k, _)| {
                let nu = t.grading(k / dim, k % dim);
                nu[0].unsigned_abs().max(nu[1].unsigned_abs()) as usize
            })
            .max()
            .unwrap_or(0);
    }

    pub fn get(&self, m: [usize; 2], n: [usize; 2]) -> Complex64 {
        let t = self.truncation;
        self.data[t.index(m) * self.dim() + t.index(n)]
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn set(&mut self, m: [usize; 2], n: [usize; 2], v: Complex64) {
        let t = self.truncation;
        let dim = self.dim();
        self.data[t.index(m) * dim + t.index(n)] = v;
        if v != ZERO {
            let nu = t.grading(t.index(m), t.index(n));
            self.bandwidth = self
                .bandwidth
                .max(nu[0].unsigned_abs().max(nu[1].unsigned_abs()) as usize);
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).collect()
    }

    /// Diagonal part as a matrix.
    pub fn diagonal_part(&self) -> GradedMatrix {
        let d = self.diagonal();
        Self::diagonal_from(self.truncation, |n| d[self.truncation.index(n)])
    }

    pub fn off_diagonal_part(&self) -> GradedMatrix {
        let mut m = self.clone();
        let dim = self.dim();
        for i in 0..dim {
            m.data[i * dim + i] = ZERO;
        }
        m.refresh_bandwidth();
        m
    }

    fn ensure_compatible(&self, other: &GradedMatrix) -> Result<()> {
        if self.truncation != other.truncation {
            return Err(Error::InvalidParams(format!(
                "truncation mismatch: n_max {} vs {}",
                self.truncation.n_max, other.truncation.n_max
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        self.ensure_compatible(other)?;
        Ok(GradedMatrix {
            truncation: self.truncation,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            bandwidth: self.bandwidth.max(other.bandwidth),
        })
    }

    pub fn sub(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn add_assign(&mut self, other: &GradedMatrix) -> Result<()> {
        self.ensure_compatible(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        self.bandwidth = self.bandwidth.max(other.bandwidth);
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> GradedMatrix {
        let mut m = GradedMatrix {
            truncation: self.truncation,
            data: self.data.iter().map(|v| v * c).collect(),
            bandwidth: self.bandwidth,
        };
        if c == ZERO {
            m.bandwidth = 0;
        }
        m
    }

    /// Matrix product; rows run in parallel, each with a fixed inner order.
    pub fn mul(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        self.ensure_compatible(other)?;
        let dim = self.dim();
        let data: Vec<Complex64> = (0..dim)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut row = vec![ZERO; dim];
                for k in 0..dim {
                    let a = self.data[i * dim + k];
                    if a == ZERO {
                        continue;
                    }
                    let brow = &other.data[k * dim..(k + 1) * dim];
                    for (r, b) in row.iter_mut().zip(brow) {
                        *r += a * b;
                    }
                }
                row
            })
            .collect();
        let mut m = GradedMatrix {
            truncation: self.truncation,
            data,
            bandwidth: 0,
        };
        m.refresh_bandwidth();
        Ok(m)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        let mut m = GradedMatrix {
            truncation: self.truncation,
            data: ab.data.iter().zip(&ba.data).map(|(x, y)| x - y).collect(),
            bandwidth: 0,
        };
        m.refresh_bandwidth();
        Ok(m)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `Σ_ν e^{ρ|ν|₁} max_{m−n=ν} |A_{mn}|`.
    pub fn graded_norm(&self, rho: f64) -> f64 {
        let dim = self.dim();
        let t = self.truncation;
        let span = 2 * t.n_max + 1;
        let mut per_nu = vec![0.0f64; span * span];
        for (k, v) in self.data.iter().enumerate() {
            if *v == ZERO {
                continue;
            }
            let nu = t.grading(k / dim, k % dim);
            let slot = (nu[0] + t.n_max as i64) as usize * span + (nu[1] + t.n_max as i64) as usize;
            per_nu[slot] = per_nu[slot].max(v.norm());
        }
        let mut acc = 0.0;
        for (slot, m) in per_nu.iter().enumerate() {
            if *m == 0.0 {
                continue;
            }
            let nu1 = (slot / span) as i64 - t.n_max as i64;
            let nu2 = (slot % span) as i64 - t.n_max as i64;
            acc += (rho * (nu1.abs() + nu2.abs()) as f64).exp() * m;
        }
        acc
    }

    /// Largest `|A_{mn}|` with both `m` and `n` at distance `> depth` from the edge.
    pub fn interior_max_abs(&self, depth: usize) -> f64 {
        let dim = self.dim();
        let t = self.truncation;
        let mut best = 0.0f64;
        for i in 0..dim {
            if !t.is_interior(t.point(i), depth) {
                continue;
            }
            for j in 0..dim {
                if t.is_interior(t.point(j), depth) {
                    best = best.max(self.data[i * dim + j].norm());
                }
            }
        }
        best
    }

    /// Keeps only entries with `|ν_k| ≤ limit` on both modes; returns the
    /// largest dropped magnitude.
    pub fn band_limit(&mut self, limit: usize) -> f64 {
        let dim = self.dim();
        let t = self.truncation;
        let mut dropped = 0.0f64;
        for (k, v) in self.data.iter_mut().enumerate() {
            let nu = t.grading(k / dim, k % dim);
            if nu[0].unsigned_abs() as usize > limit || nu[1].unsigned_abs() as usize > limit {
                dropped = dropped.max(v.norm());
                *v = ZERO;
            }
        }
        self.refresh_bandwidth();
        dropped
    }

    /// Kronecker product of two single-mode `(N+1)×(N+1)` matrices.
    pub fn kron(truncation: FockTruncation, a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        let s = truncation.side();
        if a.len() != s * s || b.len() != s * s {
            return Err(Error::InvalidParams("mode matrix size mismatch".into()));
        }
        Self::from_fn(truncation, |m, n| a[m[0] * s + n[0]] * b[m[1] * s + n[1]])
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        let dim = self.dim();
        nalgebra::DMatrix::from_row_slice(dim, dim, &self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn truncation_budget() {
        assert!(FockTruncation::new(1).is_err());
        assert!(matches!(
            FockTruncation::with_budget(10, 100),
            Err(Error::Budget { .. })
        ));
        let t = FockTruncation::new(4).unwrap();
        assert_eq!(t.dim(), 25);
        assert_eq!(t.point(t.index([3, 1])), [3, 1]);
        assert_eq!(t.grading(t.index([3, 1]), t.index([1, 2])), [2, -1]);
    }

    #[test]
    fn commutator_grading_is_additive() {
        let t = FockTruncation::new(5).unwrap();
        let mut a = GradedMatrix::zeros(t);
        let mut b = GradedMatrix::zeros(t);
        for i in 0..5 {
            a.set([i + 1, i], [i, i], c(1.0 + i as f64, 0.5));
            b.set([i, i], [i, i + 1], c(-0.5, i as f64));
        }
        assert!(a.commutator(&a).unwrap().max_abs() == 0.0);
        let ab = a.commutator(&b).unwrap();
        let dim = t.dim();
        for (k, v) in ab.data.iter().enumerate() {
            if *v != ZERO {
                assert_eq!(t.grading(k / dim, k % dim), [1, -1]);
            }
        }
        assert_eq!(ab.bandwidth, 1);
    }

    #[test]
    fn graded_norm_weights() {
        let t = FockTruncation::new(3).unwrap();
        let mut a = GradedMatrix::zeros(t);
        a.set([1, 0], [0, 0], c(2.0, 0.0));
        a.set([2, 0], [1, 0], c(0.0, -3.0));
        a.set([0, 0], [0, 0], c(1.0, 0.0));
        let n = a.graded_norm(0.5);
        assert!((n - (1.0 + 3.0 * 0.5f64.exp())).abs() < 1e-15);
    }
}
