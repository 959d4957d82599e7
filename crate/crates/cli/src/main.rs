//! `qbnf` command-line front end. Exit status: 0 success, 1 numeric failure,
//! 2 configuration error, 3 budget or truncation exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qbnf::ErrorClass;

mod commands;
mod config;
mod output;

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Engine(qbnf::Error),
}

impl From<qbnf::Error> for CliError {
    fn from(e: qbnf::Error) -> Self {
        CliError::Engine(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Engine(e) => match e.class() {
                ErrorClass::Numeric => 1,
                ErrorClass::Config => 2,
                ErrorClass::Budget => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
            CliError::Engine(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "qbnf", version, about = "Quantum Birkhoff normal form runs and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Γ membership, C_δ and the lattice-minimum audit.
    CheckGamma(Common),
    /// Normal-form coefficients and spectra for every (ħ, ε).
    NormalForm(Common),
    /// Run one seeded verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: String,
    },
    /// Ratio-test radius per ħ next to the analytic ε*.
    Sweep(Common),
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    let out = cfg.output_dir.clone();
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::CheckGamma(c) => {
            let (cfg, out) = load(&c)?;
            print_json(&commands::check_gamma(&cfg, &out)?);
            Ok(true)
        }
        Command::NormalForm(c) => {
            let (cfg, out) = load(&c)?;
            let run = commands::normal_form(&cfg, &out, "normal-form")?;
            eprintln!("wrote {} series to {}", run.runs.len(), out.display());
            Ok(true)
        }
        Command::Sweep(c) => {
            let (cfg, out) = load(&c)?;
            let run = commands::sweep(&cfg, &out)?;
            eprintln!("wrote {} series and {} to {}", run.runs.len(), commands::RADIUS_FILE, out.display());
            Ok(true)
        }
        Command::Verify { common, suite } => {
            let (cfg, out) = load(&common)?;
            let artifact = commands::verify(&cfg, &suite, &out)?;
            print_json(&artifact);
            Ok(artifact.report.passed)
        }
    }
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        // a suite ran to completion but some checks failed
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qbnf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
