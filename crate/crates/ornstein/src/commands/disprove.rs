use std::time::Instant;

use num_traits::{Signed, ToPrimitive};
use ornstein_core::algebra::{build_gradient_space, dependence_coefficients};
use ornstein_core::ratio::{anisotropic_schedule, dyadic_schedule, ratio_trend, RatioOptions};
use ornstein_core::Rational;
use serde::Serialize;

use super::{operator_entries, parse_grid, parse_scheme, require_ops, usage, Ctx, OperatorEntry};
use crate::cli::DisproveArgs;
use crate::error::CliResult;
use crate::report::file_name;
use crate::witness;

#[derive(Debug, Serialize)]
pub struct RunEntry {
    pub grid: Vec<usize>,
    pub ratio: f64,
    pub start_ratio: f64,
    pub iterations: usize,
    pub witness_path: Option<String>,
    pub trace: Vec<(usize, f64)>,
}

#[derive(Debug, Serialize)]
pub struct TrendRow {
    pub grid: String,
    pub ratio: f64,
    pub start_ratio: f64,
    pub iterations: usize,
}

#[derive(Debug, Serialize)]
pub struct TraceRow {
    pub grid: String,
    pub iteration: usize,
    pub best_ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct Disproof {
    pub operators: Vec<OperatorEntry>,
    pub pattern: String,
    pub schedule: Vec<Vec<usize>>,
    pub runs: Vec<RunEntry>,
    pub strictly_increasing: bool,
    pub relative_increase: f64,
    /// `Σ|λ_j|` for a dependent family; every ratio must stay below it.
    pub dependence_bound: Option<f64>,
}

fn grid_label(g: &[usize]) -> String {
    g.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x")
}

pub fn run(mut args: DisproveArgs, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    let (_, file) = require_ops(&args.ops)?;
    let grid = args.grid.get_or_insert_with(|| "32".into()).clone();
    let levels = *args.levels.get_or_insert(3);
    let anisotropic = *args.anisotropic.get_or_insert(false);
    let opts = RatioOptions {
        budget: *args.budget.get_or_insert(2000),
        stages: *args.stages.get_or_insert(8),
        seed: *args.seed.get_or_insert(0),
        scheme: parse_scheme(args.scheme.get_or_insert_with(|| "fd4".into()))?,
        ..Default::default()
    };
    if levels < 3 {
        return Err(usage("a trend needs at least 3 resolutions"));
    }
    let ops = &file.operators;
    let space = build_gradient_space(ops)?;
    let base = parse_grid(&grid, file.dim)?;
    let schedule = if anisotropic {
        anisotropic_schedule(&base, space.pattern().gamma(), levels)
    } else {
        dyadic_schedule(&base, levels)
    };
    let names: Vec<String> = schedule.iter().map(|g| format!("disprove_{}.ornf", grid_label(g))).collect();
    ctx.output.claim(&names)?;
    let runs = ratio_trend(ops, &schedule, &opts)?;
    let mut entries = Vec::new();
    let mut trend = Vec::new();
    let mut trace = Vec::new();
    for (run, name) in runs.into_iter().zip(&names) {
        let label = grid_label(run.grid());
        ctx.note(&format!("grid {label}: ratio {:.6} (start {:.6})", run.ratio, run.start_ratio));
        let path = if ctx.output.enabled() {
            ctx.output.write(name, &witness::encode(run.grid(), run.witness.values())?)?.map(|p| file_name(&p))
        } else {
            None
        };
        trend.push(TrendRow { grid: label.clone(), ratio: run.ratio, start_ratio: run.start_ratio, iterations: run.iterations });
        trace.extend(run.trace.iter().map(|&(iteration, best_ratio)| TraceRow { grid: label.clone(), iteration, best_ratio }));
        entries.push(RunEntry {
            grid: run.grid().to_vec(),
            ratio: run.ratio,
            start_ratio: run.start_ratio,
            iterations: run.iterations,
            witness_path: path,
            trace: run.trace,
        });
    }
    ctx.output.write_csv("disprove_trend.csv", &trend)?;
    ctx.output.write_csv("disprove_trace.csv", &trace)?;
    let ratios: Vec<f64> = entries.iter().map(|e| e.ratio).collect();
    let dependence_bound = dependence_coefficients(ops)?
        .map(|l| l.iter().map(|v| v.abs()).fold(Rational::default(), |a, b| a + b).to_f64().unwrap_or(f64::NAN));
    let result = Disproof {
        operators: operator_entries(&file),
        pattern: space.pattern().to_string(),
        schedule,
        strictly_increasing: ratios.windows(2).all(|w| w[1] > w[0]),
        relative_increase: ratios.last().unwrap_or(&0.0) / ratios.first().unwrap_or(&1.0) - 1.0,
        runs: entries,
        dependence_bound,
    };
    ctx.emit("disprove", &args, result, start)?;
    Ok(())
}
