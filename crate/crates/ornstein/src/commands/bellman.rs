use std::time::Instant;

use ornstein_core::algebra::build_gradient_space;
use ornstein_core::bellman::{BellmanEstimate, BellmanOptions, BellmanProblem, VFunction};
use ornstein_core::seeded_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{operator_entries, parse_f64_list, parse_grid, parse_scheme, require_ops, usage, Ctx, OperatorEntry};
use crate::cli::BellmanArgs;
use crate::error::CliResult;
use crate::report::file_name;
use crate::witness;

#[derive(Debug, Serialize)]
pub struct Estimate {
    pub e: Vec<f64>,
    pub value: f64,
    pub v_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub trace_non_increasing: bool,
    pub witness_path: Option<String>,
    pub trace: Option<Vec<(usize, f64)>>,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub e: String,
    pub v_value: f64,
    pub value: f64,
    pub gap: f64,
}

#[derive(Debug, Serialize)]
pub struct BellmanResult {
    pub operators: Vec<OperatorEntry>,
    pub pattern: String,
    pub derivatives: Vec<String>,
    pub grid: Vec<usize>,
    pub estimates: Vec<Estimate>,
    pub all_below_v: bool,
}

fn summarize(est: BellmanEstimate, keep_trace: bool, witness_path: Option<String>) -> Estimate {
    Estimate {
        trace_non_increasing: est.trace.windows(2).all(|w| w[1].1 <= w[0].1),
        e: est.e,
        value: est.value,
        v_value: est.v_value,
        gap: est.gap,
        iterations: est.iterations,
        witness_path,
        trace: keep_trace.then_some(est.trace),
    }
}

pub fn run(mut args: BellmanArgs, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    let (_, file) = require_ops(&args.ops)?;
    let space = build_gradient_space(&file.operators)?;
    let sizes = parse_grid(args.grid.get_or_insert_with(|| "32".into()), file.dim)?;
    let opts = BellmanOptions {
        budget: *args.budget.get_or_insert(400),
        stages: *args.stages.get_or_insert(4),
        restarts: *args.restarts.get_or_insert(1),
        seed: *args.seed.get_or_insert(0),
        scheme: parse_scheme(args.scheme.get_or_insert_with(|| "fd4".into()))?,
        ..Default::default()
    };
    let vf = VFunction::new(space.clone(), *args.c.get_or_insert(0.1), *args.p.get_or_insert(1.0))?;
    let problem = BellmanProblem::new(vf, &sizes, opts.scheme)?;
    let estimates = match &args.e {
        Some(text) => {
            let e = parse_f64_list(text, "e")?;
            if e.len() != space.dim_e() {
                return Err(usage(format!("e has {} entries, E has dimension {}", e.len(), space.dim_e())));
            }
            ctx.output.claim(&["bellman_witness.ornf".into()])?;
            let est = problem.upper(&e, None, &opts)?;
            let path = if ctx.output.enabled() {
                ctx.output.write("bellman_witness.ornf", &witness::encode(&sizes, est.witness.values())?)?.map(|p| file_name(&p))
            } else {
                None
            };
            vec![summarize(est, true, path)]
        }
        None => {
            let count = *args.samples.get_or_insert(8);
            let mut rng = seeded_rng(opts.seed);
            let points: Vec<Vec<f64>> =
                (0..count).map(|_| (0..space.dim_e()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let runs: Vec<_> = points
                .par_iter()
                .enumerate()
                .map(|(i, e)| problem.upper(e, None, &BellmanOptions { seed: opts.seed.wrapping_add(i as u64), ..opts.clone() }))
                .collect::<Result<_, _>>()?;
            let rows: Vec<SweepRow> = runs
                .iter()
                .enumerate()
                .map(|(index, r)| SweepRow {
                    index,
                    e: r.e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"),
                    v_value: r.v_value,
                    value: r.value,
                    gap: r.gap,
                })
                .collect();
            ctx.output.write_csv("bellman_sweep.csv", &rows)?;
            runs.into_iter().map(|r| summarize(r, false, None)).collect()
        }
    };
    let result = BellmanResult {
        operators: operator_entries(&file),
        pattern: space.pattern().to_string(),
        derivatives: space.derivatives().iter().map(|a| a.to_string()).collect(),
        grid: sizes,
        all_below_v: estimates.iter().all(|e| e.value <= e.v_value + 1e-9),
        estimates,
    };
    ctx.emit("bellman", &args, result, start)?;
    Ok(())
}
