//! JSON reports, CSV tables and the output directory.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// SHA-256 of the compact JSON form of `config`.
pub fn config_hash<C: Serialize>(config: &C) -> CliResult<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Everything except `timing` is a function of the configuration.
#[derive(Clone, Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub config_hash: String,
    pub config: &'a C,
    pub result: R,
    pub timing: Timing,
}

pub fn render<C: Serialize, R: Serialize>(command: &str, config: &C, result: R, seconds: f64) -> CliResult<String> {
    let report = Report {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(config)?,
        config,
        result,
        timing: Timing { seconds },
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

/// Optional output directory; files are never replaced unless `overwrite`.
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub overwrite: bool,
}

impl Output {
    pub fn new(dir: Option<PathBuf>, overwrite: bool) -> Self {
        Output { dir, overwrite }
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    /// Refuses early when any of `names` would be replaced.
    pub fn claim(&self, names: &[String]) -> CliResult<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        if !self.overwrite {
            for n in names {
                let p = dir.join(n);
                if p.exists() {
                    return Err(CliError::Exists(p));
                }
            }
        }
        Ok(())
    }

    /// Writes `bytes` to `dir/name`; returns `None` when no directory is set.
    pub fn write(&self, name: &str, bytes: &[u8]) -> CliResult<Option<PathBuf>> {
        let Some(dir) = &self.dir else { return Ok(None) };
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(name);
        if path.exists() && !self.overwrite {
            return Err(CliError::Exists(path));
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        Ok(Some(path))
    }

    pub fn write_csv<R: Serialize>(&self, name: &str, rows: &[R]) -> CliResult<Option<PathBuf>> {
        if !self.enabled() {
            return Ok(None);
        }
        self.write(name, &csv_bytes(rows)?)
    }
}

pub fn csv_bytes<R: Serialize>(rows: &[R]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::io("<csv>", e.into_error()))
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}
