//! Direct eigenvalues of the truncated `P₀ + εF₀`, labeled by continuation
//! from `ε = 0`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::FrequencyPair;
use crate::qnf::fock::{FockTruncation, GradedMatrix};
use crate::qnf::weyl::{p0_eigenvalue, p0_matrix, weyl_matrix, PerturbationSpec};

pub const CONTINUATION_STEPS: usize = 10;
pub const AMBIGUITY_FACTOR: f64 = 10.0;
const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledEigenvalue {
    pub n: [usize; 2],
    pub re: f64,
    pub im: f64,
}

impl LabeledEigenvalue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub epsilon: f64,
    pub hbar: f64,
    pub omega: FrequencyPair,
    pub n_max: usize,
    pub source: String,
    pub eigenvalues: Vec<LabeledEigenvalue>,
}

impl SpectrumResult {
    pub fn get(&self, n: [usize; 2]) -> Option<Complex64> {
        self.eigenvalues.iter().find(|e| e.n == n).map(|e| e.value())
    }

    pub const CSV_HEADER: &'static str = "n1,n2,eps,hbar,re_E,im_E,source";

    /// Rows without the header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for e in &self.eigenvalues {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e},{:e},{}",
                e.n[0], e.n[1], self.epsilon, self.hbar, e.re, e.im, self.source
            );
        }
        out
    }
}

pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::LinearAlgebra("Schur iteration did not converge".into()))?;
    Ok(schur.eigenvalues().map(|v| v.iter().cloned().collect()).unwrap_or_else(|| {
        let (_, t) = schur.unpack();
        t.diagonal().iter().cloned().collect()
    }))
}

/// Tracks the eigenvalues of `P₀ + εF₀` for the given labels (all lattice
/// points when `labels` is `None`). A match is ambiguous when a second
/// eigenvalue lies within ten times the expected prediction error.
pub fn diagonalize_matrix(
    f0: &GradedMatrix,
    omega: &FrequencyPair,
    hbar: f64,
    epsilon: f64,
    labels: Option<&[[usize; 2]]>,
) -> Result<SpectrumResult> {
    if !epsilon.is_finite() {
        return Err(Error::InvalidParams(format!("epsilon must be finite, got {epsilon}")));
    }
    let t = f0.truncation;
    let labels: Vec<[usize; 2]> = match labels {
        Some(l) => {
            if let Some(bad) = l.iter().find(|n| !t.contains(**n)) {
                return Err(Error::InvalidParams(format!("label {bad:?} outside the truncation")));
            }
            l.to_vec()
        }
        None => (0..t.dim()).map(|i| t.point(i)).collect(),
    };
    let p0 = p0_matrix(t, omega, hbar);
    let start: Vec<Complex64> = labels.iter().map(|n| p0_eigenvalue(*n, omega, hbar)).collect();
    let mut result = SpectrumResult {
        epsilon,
        hbar,
        omega: *omega,
        n_max: t.n_max,
        source: "diagonalization".into(),
        eigenvalues: Vec::new(),
    };
    if epsilon == 0.0 {
        result.eigenvalues = labels
            .iter()
            .zip(&start)
            .map(|(n, v)| LabeledEigenvalue { n: *n, re: v.re, im: v.im })
            .collect();
        return Ok(result);
    }

    let dense_p0 = p0.to_nalgebra();
    let dense_f = f0.to_nalgebra();
    let step = epsilon / CONTINUATION_STEPS as f64;
    // first-step prediction error: the second-order shift
    let mut residual: Vec<f64> = labels
        .iter()
        .map(|n| {
            let i = t.index(*n);
            let e_n = p0_eigenvalue(*n, omega, hbar);
            let second: f64 = (0..t.dim())
                .filter(|&m| m != i)
                .map(|m| {
                    let gap = e_n - p0_eigenvalue(t.point(m), omega, hbar);
                    (dense_f[(i, m)] * dense_f[(m, i)] / gap).norm()
                })
                .sum();
            step * step * second
        })
        .collect();

    let mut prev: Option<Vec<Complex64>> = None;
    let mut current = start.clone();
    for k in 1..=CONTINUATION_STEPS {
        let eps_k = step * k as f64;
        let m = &dense_p0 + &dense_f * Complex64::new(eps_k, 0.0);
        let eig = eigenvalues(&m)?;
        let predicted: Vec<Complex64> = match &prev {
            None => labels
                .iter()
                .zip(&current)
                .map(|(n, e)| e + f0.get(*n, *n) * step)
                .collect(),
            Some(p) => current.iter().zip(p).map(|(c, q)| 2.0 * c - q).collect(),
        };
        let mut chosen = Vec::with_capacity(labels.len());
        let mut used = vec![None::<usize>; eig.len()];
        for (li, pred) in predicted.iter().enumerate() {
            let mut order: Vec<(f64, usize)> =
                eig.iter().enumerate().map(|(j, e)| ((e - pred).norm(), j)).collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (_, best) = order[0];
            let tol = AMBIGUITY_FACTOR * residual[li];
            let clash = used[best].is_some();
            let crowded = order.get(1).is_some_and(|(d, _)| *d < tol);
            if clash || crowded {
                let mut involved = vec![labels[li]];
                if let Some(other) = used[best] {
                    involved.push(labels[other]);
                }
                return Err(Error::TrackingAmbiguity {
                    labels: involved,
                    epsilon: eps_k,
                });
            }
            used[best] = Some(li);
            // the next extrapolation error is comparable to this one
            residual[li] = (eig[best] - pred).norm();
            chosen.push(eig[best]);
        }
        prev = Some(std::mem::replace(&mut current, chosen));
    }
    result.eigenvalues = labels
        .iter()
        .zip(&current)
        .map(|(n, v)| LabeledEigenvalue { n: *n, re: v.re, im: v.im })
        .collect();
    Ok(result)
}

pub fn diagonalize(
    spec: &PerturbationSpec,
    omega: &FrequencyPair,
    hbar: f64,
    epsilon: f64,
    truncation: FockTruncation,
) -> Result<SpectrumResult> {
    let f0 = weyl_matrix(spec, omega, hbar, truncation)?.matrix;
    diagonalize_matrix(&f0, omega, hbar, epsilon, None)
}

/// Independent ε points in parallel; each continuation stays sequential.
pub fn diagonalize_many(
    f0: &GradedMatrix,
    omega: &FrequencyPair,
    hbar: f64,
    epsilons: &[f64],
    labels: Option<&[[usize; 2]]>,
) -> Result<Vec<SpectrumResult>> {
    epsilons
        .par_iter()
        .map(|&e| diagonalize_matrix(f0, omega, hbar, e, labels))
        .collect()
}
