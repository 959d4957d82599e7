//! Result persistence. Every file carries the same metadata block and is
//! written to a temporary sibling first, then renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub qbnf: &'static str,
    pub qbnf_cli: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationMeta {
    pub n_max: usize,
    pub lattice_dim: usize,
    pub nu_max: i64,
    pub grid_points: usize,
    pub s_max: f64,
    pub order: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: &'static str,
    pub config_hash: String,
    pub versions: Versions,
    pub truncation: TruncationMeta,
    /// `None` where no series is computed.
    pub contamination_depth: Option<usize>,
    pub seed: u64,
}

impl Meta {
    pub fn new(command: &'static str, cfg: &RunConfig, contamination_depth: Option<usize>) -> Self {
        let t = &cfg.truncation;
        Meta {
            command,
            config_hash: cfg.hash(),
            versions: Versions {
                qbnf: qbnf::VERSION,
                qbnf_cli: env!("CARGO_PKG_VERSION"),
            },
            truncation: TruncationMeta {
                n_max: t.n_max,
                lattice_dim: (t.n_max + 1) * (t.n_max + 1),
                nu_max: t.nu_max,
                grid_points: t.grid_points,
                s_max: t.s_max,
                order: cfg.order,
            },
            contamination_depth,
            seed: cfg.seed,
        }
    }

    /// The same block as `# key: value` lines for CSV headers.
    pub fn csv_preamble(&self) -> String {
        let value = serde_json::to_value(self).expect("meta serializes");
        let mut out = String::new();
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                out.push_str(&format!("# {k}: {v}\n"));
            }
        }
        out
    }
}

/// Writes `bytes` to `dir/name` through a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", target.display()));
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, &target).map_err(io)?;
    Ok(target)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("result serializes");
    bytes.push(b'\n');
    write_atomic(dir, name, &bytes)
}

/// `1e-1` style tag for file names.
pub fn number_tag(x: f64) -> String {
    format!("{x:e}")
}
