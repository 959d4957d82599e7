use std::fmt::Write as _;
use std::path::Path;

use qbnf::freq::{denominator_lower_bound, in_gamma, lattice_audit, LatticeAudit};
use qbnf::oracle::diagonalize::{diagonalize_many, SpectrumResult};
use qbnf::qnf::contraction::perturbation_symbol_norm;
use qbnf::qnf::fock::{FockTruncation, GradedMatrix};
use qbnf::qnf::normal_form::{eigenvalue_series, mu_and_radius, normal_form_orders, ratio_test_radius, NormalFormSeries};
use qbnf::qnf::weyl::weyl_matrix;
use qbnf::suites::{run_suite, SuiteContext, SuiteReport};
use qbnf::symcalc::norms::GammaSupNorm;
use qbnf::{Error, FrequencyPair, GammaParams};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{number_tag, write_atomic, write_json, Meta};
use crate::CliError;

pub const AUDIT_RANGES: [i64; 3] = [10, 50, 200];
pub const SPECTRA_FILE: &str = "spectra.csv";
pub const RADIUS_FILE: &str = "radius.csv";

#[derive(Debug, Serialize)]
pub struct GammaReport {
    pub meta: Meta,
    pub omega: FrequencyPair,
    pub gamma: GammaParams,
    pub member: bool,
    /// Why membership could not be decided, when it could not.
    pub reason: Option<String>,
    pub modulus: f64,
    pub parallel_ratio: f64,
    pub c_delta: Option<f64>,
    pub audit: Vec<LatticeAudit>,
}

pub fn check_gamma(cfg: &RunConfig, out: &Path) -> Result<GammaReport, CliError> {
    cfg.validate()?;
    let (member, reason) = match in_gamma(&cfg.omega, &cfg.gamma) {
        Ok(m) => (m, None),
        Err(e) => (false, Some(e.to_string())),
    };
    let c_delta = denominator_lower_bound(&cfg.omega).ok();
    let audit = if c_delta.is_some() {
        AUDIT_RANGES
            .iter()
            .map(|&r| lattice_audit(&cfg.omega, r))
            .collect::<qbnf::Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let report = GammaReport {
        meta: Meta::new("check-gamma", cfg, None),
        omega: cfg.omega,
        gamma: cfg.gamma,
        member,
        reason,
        modulus: cfg.omega.modulus(),
        parallel_ratio: cfg.omega.parallel_ratio(),
        c_delta,
        audit,
    };
    write_json(out, "check_gamma.json", &report)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
struct SeriesArtifact<'a> {
    meta: &'a Meta,
    symbol_norm: &'a Option<GammaSupNorm>,
    /// `(ε, μ)` for every configured ε.
    mu_by_epsilon: Vec<[f64; 2]>,
    labels: &'a [[usize; 2]],
    series: &'a NormalFormSeries,
}

/// One ħ of a normal-form run.
pub struct HbarRun {
    pub hbar: f64,
    pub series: NormalFormSeries,
    pub labels: Vec<[usize; 2]>,
}

pub struct NormalFormRun {
    pub meta: Meta,
    pub runs: Vec<HbarRun>,
}

fn interior_labels(cfg: &RunConfig, nf: &NormalFormSeries) -> Result<Vec<[usize; 2]>, CliError> {
    let t = nf.truncation;
    let labels: Vec<[usize; 2]> = match &cfg.labels {
        Some(l) => l.clone(),
        None => (0..t.dim())
            .map(|i| t.point(i))
            .filter(|n| t.is_interior(*n, nf.contamination_depth))
            .collect(),
    };
    if labels.is_empty() {
        // nothing survives the boundary shell; report the origin
        nf.check_point([0, 0])?;
    }
    for n in &labels {
        nf.check_point(*n)?;
    }
    Ok(labels)
}

fn series_rows(nf: &NormalFormSeries, labels: &[[usize; 2]], eps: f64, hbar: f64) -> Result<String, CliError> {
    let mut out = String::new();
    for n in labels {
        let (v, _) = eigenvalue_series(nf, *n, eps)?;
        let _ = writeln!(out, "{},{},{:e},{:e},{:e},{:e},series", n[0], n[1], eps, hbar, v.re, v.im);
    }
    Ok(out)
}

pub fn normal_form(cfg: &RunConfig, out: &Path, command: &'static str) -> Result<NormalFormRun, CliError> {
    cfg.validate()?;
    cfg.validate_member()?;
    let t = FockTruncation::new(cfg.truncation.n_max)?;
    let norm = perturbation_symbol_norm(
        &cfg.perturbation,
        &cfg.omega,
        &cfg.gamma,
        cfg.rho,
        cfg.sigma,
        &cfg.truncation.symbol_grid(),
    )?;
    let eps_max = cfg.epsilon.iter().cloned().fold(0.0, f64::max);
    let mut runs = Vec::new();
    let mut csv = String::new();
    let mut depth = None;
    let mut meta = Meta::new(command, cfg, None);
    for &hbar in &cfg.hbar {
        let f: GradedMatrix = weyl_matrix(&cfg.perturbation, &cfg.omega, hbar, t)?.matrix;
        let mut nf = normal_form_orders(&f, &cfg.omega, hbar, cfg.order)?;
        if let Some(n) = &norm {
            nf = nf.with_radius(n.value, cfg.sigma, cfg.rho, eps_max)?;
        }
        depth = Some(nf.contamination_depth);
        meta.contamination_depth = depth;
        let labels = interior_labels(cfg, &nf)?;
        let mu_by_epsilon = match &norm {
            Some(n) => cfg
                .epsilon
                .iter()
                .map(|&e| Ok([e, mu_and_radius(n.value, cfg.sigma, e)?.0]))
                .collect::<qbnf::Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let artifact = SeriesArtifact {
            meta: &meta,
            symbol_norm: &norm,
            mu_by_epsilon,
            labels: &labels,
            series: &nf,
        };
        write_json(out, &format!("normal_form_hbar_{}.json", number_tag(hbar)), &artifact)?;
        if !cfg.epsilon.is_empty() {
            let spectra: Vec<SpectrumResult> = diagonalize_many(&f, &cfg.omega, hbar, &cfg.epsilon, Some(&labels))?;
            for (eps, s) in cfg.epsilon.iter().zip(&spectra) {
                csv.push_str(&series_rows(&nf, &labels, *eps, hbar)?);
                csv.push_str(&s.csv_rows());
            }
        }
        runs.push(HbarRun {
            hbar,
            series: nf,
            labels,
        });
    }
    meta.contamination_depth = depth;
    if !cfg.epsilon.is_empty() {
        let body = format!("{}{}\n{csv}", meta.csv_preamble(), SpectrumResult::CSV_HEADER);
        write_atomic(out, SPECTRA_FILE, body.as_bytes())?;
    }
    Ok(NormalFormRun { meta, runs })
}

pub const RADIUS_HEADER: &str = "n1,n2,hbar,radius,eps_star";

/// Ratio-test radius per (ħ, label) next to the analytic `ε*`.
pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<NormalFormRun, CliError> {
    if cfg.hbar.is_empty() {
        return Err(CliError::Config("hbar: sweep needs a nonempty grid".into()));
    }
    if cfg.epsilon.is_empty() {
        return Err(CliError::Config("epsilon: sweep needs a nonempty grid".into()));
    }
    let run = normal_form(cfg, out, "sweep")?;
    let first = cfg.order.saturating_sub(1).clamp(1, 3);
    let mut body = format!("{}{RADIUS_HEADER}\n", run.meta.csv_preamble());
    for r in &run.runs {
        let eps_star = r.series.epsilon_star.map_or("inf".to_string(), |e| format!("{e:e}"));
        for n in &r.labels {
            let radius = match ratio_test_radius(&r.series, *n, first) {
                Ok(v) => format!("{v:e}"),
                // the series terminates at this point
                Err(Error::InvalidParams(_)) => "inf".to_string(),
                Err(e) => return Err(e.into()),
            };
            let _ = writeln!(body, "{},{},{:e},{radius},{eps_star}", n[0], n[1], r.hbar);
        }
    }
    write_atomic(out, RADIUS_FILE, body.as_bytes())?;
    Ok(run)
}

#[derive(Debug, Serialize)]
pub struct VerifyArtifact {
    pub meta: Meta,
    pub report: SuiteReport,
}

pub fn verify(cfg: &RunConfig, suite: &str, out: &Path) -> Result<VerifyArtifact, CliError> {
    cfg.validate()?;
    let ctx = SuiteContext {
        seed: cfg.seed,
        omega: cfg.omega,
        gamma: cfg.gamma,
        sigma: cfg.sigma,
        rho: cfg.rho,
    };
    let report = run_suite(suite, &ctx)?;
    let artifact = VerifyArtifact {
        meta: Meta::new("verify", cfg, None),
        report,
    };
    write_json(out, &format!("verify_{suite}.json"), &artifact)?;
    Ok(artifact)
}
