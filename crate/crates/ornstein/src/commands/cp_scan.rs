use std::time::Instant;

use ornstein_core::asymptotics::cp_scan_with;
use ornstein_core::ratio::RatioOptions;
use serde::Serialize;

use super::{operator_entries, parse_f64_list, parse_grid, parse_scheme, require_ops, Ctx, OperatorEntry};
use crate::cli::CpScanArgs;
use crate::error::CliResult;
use crate::report::file_name;
use crate::witness;

#[derive(Debug, Serialize)]
pub struct Row {
    pub p: f64,
    pub bound: f64,
    pub grid: String,
    pub iters: usize,
    pub seconds: f64,
    pub witness_path: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CpEntryOut {
    pub p: f64,
    pub bound: f64,
    pub iterations: usize,
    pub witness_path: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CpResult {
    pub operators: Vec<OperatorEntry>,
    pub grid: Vec<usize>,
    pub entries: Vec<CpEntryOut>,
    pub non_decreasing_within_1pct: bool,
    /// Slope of `log bound` against `log 1/(p−1)`; reported, not asserted.
    pub slope: Option<f64>,
}

fn witness_name(p: f64) -> String {
    format!("cp_p{}.ornf", p.to_string().replace('.', "_"))
}

pub fn run(mut args: CpScanArgs, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    let (_, file) = require_ops(&args.ops)?;
    let ps = parse_f64_list(args.p_list.get_or_insert_with(|| "2,1.5,1.25,1.125".into()), "p-list")?;
    let sizes = parse_grid(args.grid.get_or_insert_with(|| "64".into()), file.dim)?;
    let opts = RatioOptions {
        budget: *args.budget.get_or_insert(2000),
        seed: *args.seed.get_or_insert(0),
        scheme: parse_scheme(args.scheme.get_or_insert_with(|| "fd4".into()))?,
        ..Default::default()
    };
    ctx.output.claim(&ps.iter().map(|p| witness_name(*p)).collect::<Vec<_>>())?;
    let label = sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x");
    let mut rows = Vec::new();
    let mut write_err = None;
    let mut last = Instant::now();
    let scan = cp_scan_with(&file.operators, &ps, &sizes, &opts, |e| {
        let seconds = last.elapsed().as_secs_f64();
        last = Instant::now();
        ctx.note(&format!("p={}: bound {:.6}", e.p, e.bound));
        let path = match witness::encode(&sizes, e.witness.values()).and_then(|b| ctx.output.write(&witness_name(e.p), &b)) {
            Ok(p) => p.map(|p| file_name(&p)),
            Err(err) => {
                write_err.get_or_insert(err);
                None
            }
        };
        rows.push(Row { p: e.p, bound: e.bound, grid: label.clone(), iters: e.iterations, seconds, witness_path: path });
    })?;
    if let Some(err) = write_err {
        return Err(err);
    }
    ctx.output.write_csv("cp_scan.csv", &rows)?;
    let result = CpResult {
        operators: operator_entries(&file),
        grid: sizes,
        non_decreasing_within_1pct: scan.non_decreasing(0.01),
        slope: scan.slope,
        entries: rows
            .iter()
            .map(|r| CpEntryOut { p: r.p, bound: r.bound, iterations: r.iters, witness_path: r.witness_path.clone() })
            .collect(),
    };
    ctx.emit("cp-scan", &args, result, start)?;
    Ok(())
}
