//! Uniform grids in the Fourier variable and symbols sampled on them.
//!
//! Nodes along each axis sit at `-S + j h`, `j = 0..M`, `h = 2S/M`, so the
//! origin is always a node. Values are stored row-major with the last axis
//! fastest. For `d = 2` the axes are `(s_x, s_ξ)` of a single mode; for
//! `d = 4` they are `(v₁, v₂, w₁, w₂)`, dual to `(x₁, x₂, ξ₁, ξ₂)`.
//!
//! The transform convention is unitary, `ĝ(s) = (2π)^{-d/2} ∫ g(u) e^{-i⟨s,u⟩} du`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub dimension: usize,
    pub points_per_axis: usize,
    pub extent: f64,
}

impl PhaseGrid {
    pub fn new(dimension: usize, points_per_axis: usize, extent: f64) -> Result<Self> {
        let g = PhaseGrid {
            dimension,
            points_per_axis,
            extent,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 2 && self.dimension != 4 {
            return Err(Error::InvalidParams(format!(
                "grid dimension must be 2 or 4, got {}",
                self.dimension
            )));
        }
        if self.points_per_axis < 4 || self.points_per_axis % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "points per axis must be even and >= 4, got {}",
                self.points_per_axis
            )));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "grid extent must be positive, got {}",
                self.extent
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points_per_axis as f64
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    pub fn axis_value(&self, j: usize) -> f64 {
        -self.extent + j as f64 * self.spacing()
    }

    /// Per-axis indices of a linear index.
    pub fn multi_index(&self, mut idx: usize) -> [usize; 4] {
        let m = self.points_per_axis;
        let mut out = [0usize; 4];
        for k in (0..self.dimension).rev() {
            out[k] = idx % m;
            idx /= m;
        }
        out
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .take(self.dimension)
            .fold(0, |acc, &j| acc * self.points_per_axis + j)
    }

    /// Coordinates of a node; entries past `dimension` are zero.
    pub fn node(&self, idx: usize) -> [f64; 4] {
        let mi = self.multi_index(idx);
        let mut s = [0.0; 4];
        for k in 0..self.dimension {
            s[k] = self.axis_value(mi[k]);
        }
        s
    }

    pub fn origin_index(&self) -> usize {
        let half = self.points_per_axis / 2;
        self.linear_index(&[half; 4][..self.dimension])
    }

    pub fn norm_of_node(&self, idx: usize) -> f64 {
        self.node(idx).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Unitary transform prefactor `(2π)^{-d/2}`.
    pub fn transform_prefactor(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powf(-(self.dimension as f64) / 2.0)
    }

    pub fn ensure_same(&self, other: &PhaseGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// A phase-space symbol represented by samples of its Fourier transform.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSymbol {
    pub grid: PhaseGrid,
    pub values: Vec<Complex64>,
    pub label: String,
}

impl FourierSymbol {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParams(format!("non-finite sample at node {i}")));
        }
        Ok(FourierSymbol {
            grid,
            values,
            label: label.into(),
        })
    }

    pub fn zeros(grid: PhaseGrid, label: impl Into<String>) -> Self {
        FourierSymbol {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            label: label.into(),
        }
    }

    /// Samples `f(s)` at every node; `s` carries `grid.dimension` coordinates.
    pub fn from_fn(
        grid: PhaseGrid,
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| {
                let s = grid.node(i);
                f(&s[..grid.dimension])
            })
            .collect();
        Self::new(grid, values, label)
    }

    pub fn scale(&self, c: Complex64) -> FourierSymbol {
        FourierSymbol {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            label: self.label.clone(),
        }
    }

    pub fn add(&self, other: &FourierSymbol) -> Result<FourierSymbol> {
        self.grid.ensure_same(&other.grid)?;
        Ok(FourierSymbol {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            label: format!("{} + {}", self.label, other.label),
        })
    }

    pub fn origin_value(&self) -> Complex64 {
        self.values[self.grid.origin_index()]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Direct-space value `g(u) = (2π)^{-d/2} Σ ĝ(s) e^{i⟨s,u⟩} h^d`, valid at
    /// complex `u` (the sampled representation is entire).
    pub fn eval_direct(&self, u: &[Complex64]) -> Complex64 {
        let d = self.grid.dimension;
        assert!(u.len() >= d, "need {d} coordinates");
        let i = Complex64::new(0.0, 1.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, v) in self.values.iter().enumerate() {
            if *v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let s = self.grid.node(idx);
            let phase: Complex64 = (0..d).map(|k| u[k] * s[k]).sum();
            acc += v * (i * phase).exp();
        }
        acc * self.grid.transform_prefactor() * self.grid.cell_volume()
    }
}

#[derive(Serialize, Deserialize)]
struct FourierSymbolRepr {
    grid: PhaseGrid,
    label: String,
    /// Row-major, interleaved `re, im`.
    values: Vec<f64>,
}

impl Serialize for FourierSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FourierSymbolRepr {
            grid: self.grid,
            label: self.label.clone(),
            values: self.values.iter().flat_map(|v| [v.re, v.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FourierSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FourierSymbolRepr::deserialize(deserializer)?;
        if repr.values.len() % 2 != 0 {
            return Err(serde::de::Error::custom("odd number of interleaved floats"));
        }
        let values = repr
            .values
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        FourierSymbol::new(repr.grid, values, repr.label).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(PhaseGrid::new(3, 8, 1.0).is_err());
        assert!(PhaseGrid::new(2, 7, 1.0).is_err());
        assert!(PhaseGrid::new(2, 2, 1.0).is_err());
        assert!(PhaseGrid::new(2, 8, 0.0).is_err());
        let g = PhaseGrid::new(2, 8, 2.0).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.node(g.origin_index()), [0.0; 4]);
    }

    #[test]
    fn index_round_trip() {
        let g = PhaseGrid::new(4, 6, 1.0).unwrap();
        for idx in [0, 1, 17, 1000, g.len() - 1] {
            assert_eq!(g.linear_index(&g.multi_index(idx)[..4]), idx);
        }
    }

    #[test]
    fn direct_space_gaussian() {
        // ĝ = e^{-|s|²/2} is the unitary transform of g = e^{-|u|²/2}
        let g = PhaseGrid::new(2, 32, 8.0).unwrap();
        let f = FourierSymbol::from_fn(g, "gauss", |s| {
            Complex64::new((-(s[0] * s[0] + s[1] * s[1]) / 2.0).exp(), 0.0)
        })
        .unwrap();
        let u = [Complex64::new(0.3, 0.0), Complex64::new(-0.7, 0.0)];
        let exact = (-(0.09 + 0.49) / 2.0f64).exp();
        assert!((f.eval_direct(&u) - exact).norm() < 1e-10);
    }

    #[test]
    fn json_layout_is_interleaved() {
        let g = PhaseGrid::new(2, 4, 1.0).unwrap();
        let mut f = FourierSymbol::zeros(g, "z");
        f.values[1] = Complex64::new(1.5, -2.0);
        let js = serde_json::to_value(&f).unwrap();
        assert_eq!(js["values"][2], 1.5);
        assert_eq!(js["values"][3], -2.0);
        let back: FourierSymbol = serde_json::from_value(js).unwrap();
        assert_eq!(back, f);
    }
}
