//! Seeded verification campaigns. The command-line `verify` runner and the
//! acceptance tests both go through [`run_suite`].

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::{denominator_lower_bound, in_gamma, FrequencyPair, GammaParams};

pub mod operator;
pub mod symbol;

pub const SUITE_NAMES: [&str; 10] = [
    "norms",
    "moyal",
    "poincare",
    "denominators",
    "homological",
    "contraction",
    "gaussian",
    "classical-limit",
    "rs-match",
    "spectrum-match",
];

/// Inputs shared by all campaigns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteContext {
    pub seed: u64,
    pub omega: FrequencyPair,
    pub gamma: GammaParams,
    pub sigma: f64,
    pub rho: f64,
}

impl Default for SuiteContext {
    fn default() -> Self {
        SuiteContext {
            seed: 20_240_917,
            omega: FrequencyPair::from_parts(1.0, 1.0, 1.0, -2.0),
            gamma: GammaParams {
                delta1: 0.1,
                delta2: 10.0,
                delta: 0.5,
            },
            sigma: 1.0,
            rho: 0.5,
        }
    }
}

impl SuiteContext {
    /// Independent stream for one campaign.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// One measured quantity with its verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    pub fn at_most(name: &str, measured: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: measured <= limit,
            measured,
            limit,
            detail: detail.into(),
        }
    }

    pub fn at_least(name: &str, measured: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: measured >= limit,
            measured,
            limit,
            detail: detail.into(),
        }
    }

    /// Diagnostic without a verdict of its own.
    pub fn info(name: &str, measured: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            measured,
            limit: f64::NAN,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall time; excluded from serialized output so reruns compare equal.
    #[serde(skip)]
    pub seconds: f64,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite: suite.into(),
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
            seconds: 0.0,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Verdict over the named checks only.
    pub fn passed_for(&self, names: &[&str]) -> bool {
        names.iter().all(|n| self.check(n).is_some_and(|c| c.passed))
    }

    /// `name=value (limit)` pairs for one-line summaries.
    pub fn summary(&self, names: &[&str]) -> String {
        names
            .iter()
            .filter_map(|n| self.check(n))
            .map(|c| {
                if c.limit.is_nan() {
                    format!("{}={:.4e}", c.name, c.measured)
                } else {
                    format!("{}={:.4e} (limit {:.4e})", c.name, c.measured, c.limit)
                }
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

pub fn run_suite(name: &str, ctx: &SuiteContext) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut report = match name {
        "norms" => symbol::norms(ctx),
        "moyal" => symbol::moyal(ctx),
        "poincare" => symbol::poincare(ctx),
        "denominators" => symbol::denominators(ctx),
        "gaussian" => symbol::gaussian(ctx),
        "homological" => operator::homological(ctx),
        "contraction" => operator::contraction(ctx),
        "classical-limit" => operator::classical_limit(ctx),
        "rs-match" => operator::rs_match(ctx),
        "spectrum-match" => operator::spectrum_match(ctx),
        other => Err(Error::InvalidParams(format!(
            "unknown suite {other:?}; known: {}",
            SUITE_NAMES.join(", ")
        ))),
    }?;
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Rejection sampler for ω ∈ Γ with real parts bounded away from zero.
pub fn sample_gamma(rng: &mut impl Rng, gamma: &GammaParams) -> FrequencyPair {
    loop {
        let part = |rng: &mut dyn rand::RngCore| {
            let re = rng.gen_range(0.3..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let im = rng.gen_range(-2.0..2.0);
            (re, im)
        };
        let (a, b) = part(rng);
        let (c, d) = part(rng);
        let w = FrequencyPair::from_parts(a, b, c, d);
        if in_gamma(&w, gamma).unwrap_or(false) && denominator_lower_bound(&w).is_ok() {
            return w;
        }
    }
}
