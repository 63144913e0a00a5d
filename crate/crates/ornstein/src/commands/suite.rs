use std::time::Instant;

use serde::Serialize;

use super::Ctx;
use crate::cli::SuiteArgs;
use crate::error::{CliError, CliResult};
use crate::suite::{run_criterion, select};

#[derive(Debug, Serialize)]
pub struct SuiteRow {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub observed: String,
    pub expected: String,
    pub seconds: f64,
}

pub fn run(args: SuiteArgs, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    let chosen = select(args.fast, args.filter.as_deref());
    if chosen.is_empty() {
        return Err(CliError::Usage("no checks match the filter".into()));
    }
    let mut rows = Vec::new();
    for c in &chosen {
        let o = run_criterion(c);
        println!("{}", o.line());
        rows.push(SuiteRow { id: o.id, name: o.name, passed: o.passed, observed: o.observed, expected: o.expected, seconds: o.seconds });
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    println!("{} passed, {} failed", rows.len() - failed, failed);
    ctx.output.write_csv("suite.csv", &rows)?;
    let quiet = Ctx { output: ctx.output.clone(), quiet: true };
    quiet.emit("suite", &args, &rows, start)?;
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
