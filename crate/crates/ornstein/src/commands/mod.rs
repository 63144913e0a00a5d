//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ornstein_core::field::DerivativeScheme;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::opsfile::{read_ops, OpsFile};
use crate::report::{render, Output};

pub mod analyze;
pub mod bellman;
pub mod cp_scan;
pub mod disprove;
pub mod laminate;
pub mod martingale;
pub mod r4check;
pub mod sepconvex;
pub mod suite;

pub struct Ctx {
    pub output: Output,
    pub quiet: bool,
}

impl Ctx {
    /// Renders the report, writes `<command>.json` and prints it.
    pub fn emit<C: Serialize, R: Serialize>(&self, command: &str, config: &C, result: R, start: Instant) -> CliResult<String> {
        let text = render(command, config, result, start.elapsed().as_secs_f64())?;
        self.output.write(&format!("{command}.json"), text.as_bytes())?;
        if !self.quiet {
            print!("{text}");
        }
        Ok(text)
    }

    pub fn note(&self, line: &str) {
        if !self.quiet {
            eprintln!("{line}");
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn require_ops(path: &Option<PathBuf>) -> CliResult<(PathBuf, OpsFile)> {
    let path = path.clone().ok_or_else(|| usage("an operator file is required"))?;
    let file = read_ops(&path)?;
    Ok((path, file))
}

pub fn parse_f64_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("{what}: `{s}` is not a number"))))
        .collect::<CliResult<Vec<_>>>()
        .and_then(|v| if v.iter().all(|x| x.is_finite()) { Ok(v) } else { Err(usage(format!("{what}: values must be finite"))) })
}

pub fn parse_usize_list(text: &str, sep: char, what: &str) -> CliResult<Vec<usize>> {
    text.split(sep)
        .map(|s| s.trim().parse::<usize>().map_err(|_| usage(format!("{what}: `{s}` is not a non-negative integer"))))
        .collect()
}

/// `32` means `32` on every axis; `16x256` gives one size per axis.
pub fn parse_grid(text: &str, dim: usize) -> CliResult<Vec<usize>> {
    let sizes = parse_usize_list(text, 'x', "grid")?;
    match sizes.len() {
        1 => Ok(vec![sizes[0]; dim]),
        n if n == dim => Ok(sizes),
        n => Err(usage(format!("grid has {n} sizes but the operators live in dimension {dim}"))),
    }
}

pub fn parse_scheme(text: &str) -> CliResult<DerivativeScheme> {
    match text {
        "spectral" => Ok(DerivativeScheme::Spectral),
        fd => match fd.strip_prefix("fd").and_then(|a| a.parse::<usize>().ok()) {
            Some(accuracy) if accuracy >= 2 && accuracy % 2 == 0 => Ok(DerivativeScheme::FiniteDifference { accuracy }),
            _ => Err(usage(format!("unknown scheme `{text}` (fd2, fd4, ..., spectral)"))),
        },
    }
}

pub fn scheme_name(s: DerivativeScheme) -> String {
    match s {
        DerivativeScheme::FiniteDifference { accuracy } => format!("fd{accuracy}"),
        DerivativeScheme::Spectral => "spectral".into(),
    }
}

pub fn display_path(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorEntry {
    pub name: String,
    pub expression: String,
}

pub fn operator_entries(file: &OpsFile) -> Vec<OperatorEntry> {
    file.operators.iter().map(|o| OperatorEntry { name: o.name().to_string(), expression: o.to_string() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_and_schemes() {
        assert_eq!(parse_grid("32", 2).unwrap(), [32, 32]);
        assert_eq!(parse_grid("16x256", 2).unwrap(), [16, 256]);
        assert!(parse_grid("16x256", 3).is_err());
        assert_eq!(parse_scheme("fd6").unwrap(), DerivativeScheme::FiniteDifference { accuracy: 6 });
        assert_eq!(parse_scheme("spectral").unwrap(), DerivativeScheme::Spectral);
        assert!(parse_scheme("fd3").is_err());
        assert_eq!(parse_f64_list("1, -0.5", "x").unwrap(), [1.0, -0.5]);
        assert!(parse_f64_list("1,inf", "x").is_err());
    }
}
