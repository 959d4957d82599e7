//! Run configuration: one JSON document, validated field by field before
//! anything is computed.

use std::path::{Path, PathBuf};

use qbnf::freq::{denominator_lower_bound, in_gamma};
use qbnf::qnf::contraction::SymbolNormGrid;
use qbnf::qnf::weyl::PerturbationSpec;
use qbnf::{FrequencyPair, GammaParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    /// Fock cutoff per mode.
    pub n_max: usize,
    /// Fourier cutoff for the symbol norm.
    pub nu_max: i64,
    /// Phase-space grid points per axis.
    pub grid_points: usize,
    /// Half-width `S_max` of the phase-space grid.
    pub s_max: f64,
    #[serde(default = "default_angular_nodes")]
    pub angular_nodes: usize,
}

fn default_angular_nodes() -> usize {
    SymbolNormGrid::default().angular_nodes
}

impl Truncation {
    pub fn symbol_grid(&self) -> SymbolNormGrid {
        SymbolNormGrid {
            points_per_axis: self.grid_points,
            extent: self.s_max,
            nu_max: self.nu_max,
            angular_nodes: self.angular_nodes,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub omega: FrequencyPair,
    pub gamma: GammaParams,
    pub hbar: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub sigma: f64,
    pub rho: f64,
    pub perturbation: PerturbationSpec,
    pub truncation: Truncation,
    pub order: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Lattice points to report; all uncontaminated points when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<[usize; 2]>>,
}

fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{name}: {msg}"))
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Field-level checks shared by every command.
    pub fn validate(&self) -> Result<(), CliError> {
        self.gamma.validate().map_err(|e| field("gamma", e))?;
        for (k, w) in [self.omega.omega1, self.omega.omega2].iter().enumerate() {
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(field(&format!("omega.omega{}", k + 1), "must be finite"));
            }
        }
        for (i, h) in self.hbar.iter().enumerate() {
            positive(&format!("hbar[{i}]"), *h)?;
        }
        for (i, e) in self.epsilon.iter().enumerate() {
            if !(*e >= 0.0 && e.is_finite()) {
                return Err(field(&format!("epsilon[{i}]"), format!("must be finite and non-negative, got {e}")));
            }
        }
        positive("sigma", self.sigma)?;
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(field("rho", format!("must be finite and non-negative, got {}", self.rho)));
        }
        self.perturbation.validate().map_err(|e| field("perturbation", e))?;
        let t = &self.truncation;
        if t.n_max == 0 {
            return Err(field("truncation.n_max", "must be positive"));
        }
        if t.nu_max <= 0 {
            return Err(field("truncation.nu_max", format!("must be positive, got {}", t.nu_max)));
        }
        if t.grid_points < 2 {
            return Err(field("truncation.grid_points", format!("need at least 2, got {}", t.grid_points)));
        }
        positive("truncation.s_max", t.s_max)?;
        if t.angular_nodes == 0 {
            return Err(field("truncation.angular_nodes", "must be positive"));
        }
        if self.order == 0 {
            return Err(field("order", "must be at least 1"));
        }
        if let Some(labels) = &self.labels {
            if let Some(bad) = labels.iter().find(|n| n[0] > t.n_max || n[1] > t.n_max) {
                return Err(field("labels", format!("{bad:?} lies outside n_max = {}", t.n_max)));
            }
        }
        Ok(())
    }

    /// Operator runs additionally need ω inside Γ.
    pub fn validate_member(&self) -> Result<(), CliError> {
        let member = in_gamma(&self.omega, &self.gamma).map_err(|e| field("omega", e))?;
        if !member {
            return Err(field("omega", format!("{:?} is outside Gamma", self.omega)));
        }
        denominator_lower_bound(&self.omega).map_err(|e| field("omega", e))?;
        Ok(())
    }

    /// SHA-256 of the canonical serialization of the effective config,
    /// output directory excluded.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
