//! Operator files: `#` comments, a `dim=<d>` line, then `name: expression` lines.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use ornstein_core::algebra::{parse_operator, DifferentialOperator};
use ornstein_core::Error;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct OpsFile {
    pub dim: usize,
    pub operators: Vec<DifferentialOperator>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct OpsFileError {
    pub line: usize,
    pub kind: OpsFileErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpsFileErrorKind {
    #[error("expected `dim=<d>` before any operator")]
    MissingDim,
    #[error("bad dimension `{0}`")]
    BadDim(String),
    #[error("expected `name: expression`")]
    MissingName,
    #[error("duplicate operator name `{0}`")]
    DuplicateName(String),
    #[error("no operators")]
    Empty,
    #[error(transparent)]
    Expression(Error),
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

/// Moves column positions from expression-relative to line-relative.
fn shift(err: Error, offset: usize) -> Error {
    match err {
        Error::Syntax { position, message } => Error::Syntax { position: position + offset, message },
        Error::IndexOutOfRange { position, index, dim } => Error::IndexOutOfRange { position: position + offset, index, dim },
        Error::ExponentOutOfRange { position, exponent, min, max } => {
            Error::ExponentOutOfRange { position: position + offset, exponent, min, max }
        }
        other => other,
    }
}

pub fn parse_ops(text: &str) -> Result<OpsFile, OpsFileError> {
    let mut dim = None;
    let mut operators = Vec::new();
    let mut names = BTreeSet::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let err = |kind| OpsFileError { line, kind };
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        let Some(d) = dim else {
            let value = body
                .trim()
                .strip_prefix("dim")
                .and_then(|r| r.trim_start().strip_prefix('='))
                .ok_or(err(OpsFileErrorKind::MissingDim))?
                .trim();
            match value.parse::<usize>() {
                Ok(d) if d > 0 => dim = Some(d),
                _ => return Err(err(OpsFileErrorKind::BadDim(value.to_string()))),
            }
            continue;
        };
        let (name, expr) = body.split_once(':').ok_or(err(OpsFileErrorKind::MissingName))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(err(OpsFileErrorKind::MissingName));
        }
        if !names.insert(name.to_string()) {
            return Err(err(OpsFileErrorKind::DuplicateName(name.to_string())));
        }
        let offset = name.len() + (body.len() - body.trim_start().len()) + 1;
        let op = parse_operator(expr, d).map_err(|e| err(OpsFileErrorKind::Expression(shift(e, offset))))?;
        operators.push(op.with_name(name));
    }
    let dim = dim.ok_or(OpsFileError { line: last_line.max(1), kind: OpsFileErrorKind::MissingDim })?;
    if operators.is_empty() {
        return Err(OpsFileError { line: last_line.max(1), kind: OpsFileErrorKind::Empty });
    }
    Ok(OpsFile { dim, operators })
}

pub fn read_ops(path: &Path) -> CliResult<OpsFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_ops(&text)?)
}

pub fn format_ops(file: &OpsFile) -> String {
    let mut out = format!("dim={}\n", file.dim);
    for op in &file.operators {
        let _ = writeln!(out, "{}: {}", op.name(), op);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let f = parse_ops("# example\n\ndim = 2\nT1: d1*d2  # mixed\nT2: d1^2\nT3: d2^2\n").unwrap();
        assert_eq!(f.dim, 2);
        let names: Vec<&str> = f.operators.iter().map(|o| o.name()).collect();
        assert_eq!(names, ["T1", "T2", "T3"]);
        assert_eq!(parse_ops(&format_ops(&f)).unwrap(), f);
    }

    #[test]
    fn reports_lines_and_columns() {
        let e = parse_ops("dim=2\nT1: d1\nT2: d1 + ? d2\n").unwrap_err();
        assert_eq!(e.line, 3);
        match e.kind {
            OpsFileErrorKind::Expression(Error::Syntax { position, .. }) => assert_eq!(position, 9),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_ops("T1: d1\n").unwrap_err().kind, OpsFileErrorKind::MissingDim);
        assert_eq!(parse_ops("dim=x\n").unwrap_err().kind, OpsFileErrorKind::BadDim("x".into()));
        assert_eq!(parse_ops("dim=2\nd1\n").unwrap_err().kind, OpsFileErrorKind::MissingName);
        assert_eq!(parse_ops("dim=2\n").unwrap_err().kind, OpsFileErrorKind::Empty);
        let dup = parse_ops("dim=2\nA: d1\nA: d2\n").unwrap_err();
        assert_eq!((dup.line, dup.kind), (3, OpsFileErrorKind::DuplicateName("A".into())));
        let range = parse_ops("dim=2\nA: d3\n").unwrap_err();
        assert!(matches!(range.kind, OpsFileErrorKind::Expression(Error::IndexOutOfRange { position: 4, .. })));
    }
}
