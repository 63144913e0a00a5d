use std::time::Instant;

use num_traits::Signed;
use ornstein_core::algebra::{
    build_gradient_space, dependence_coefficients, find_pattern, rank_one_span_dim, same_parity,
};
use ornstein_core::Rational;
use serde::Serialize;

use super::{operator_entries, require_ops, Ctx, OperatorEntry};
use crate::cli::AnalyzeArgs;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct PatternInfo {
    pub display: String,
    pub gamma: Vec<u64>,
    pub level: u64,
    pub unique: bool,
    pub generators: Vec<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct Dependence {
    pub coefficients: Option<Vec<String>>,
    /// `Σ|λ_j|` when `T₁` is a combination of the others.
    pub ratio_bound: Option<String>,
    pub verdict: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub dim: usize,
    pub operators: Vec<OperatorEntry>,
    pub pattern: PatternInfo,
    pub derivatives: Vec<String>,
    pub dim_e: usize,
    pub parity: &'static str,
    pub dependence: Dependence,
    pub rank_one_span: Option<usize>,
    pub span_samples: usize,
}

pub fn analyze_file(args: &AnalyzeArgs) -> CliResult<Analysis> {
    let (_, file) = require_ops(&args.ops)?;
    let ops = &file.operators;
    let search = find_pattern(ops)?.ok_or(ornstein_core::Error::NoCommonPattern)?;
    let space = build_gradient_space(ops)?;
    let coefficients = if ops.len() >= 2 { dependence_coefficients(ops)? } else { None };
    let dependence = match &coefficients {
        Some(l) => Dependence {
            coefficients: Some(l.iter().map(|v| v.to_string()).collect()),
            ratio_bound: Some(l.iter().map(|v| v.abs()).fold(Rational::default(), |a, b| a + b).to_string()),
            verdict: "inequality holds trivially",
        },
        None => Dependence { coefficients: None, ratio_bound: None, verdict: "none" },
    };
    let samples = args.samples.unwrap_or(space.dim_e() + 3);
    let rank_one_span =
        if same_parity(&space) { Some(rank_one_span_dim(&space, samples, args.seed.unwrap_or(0))?) } else { None };
    Ok(Analysis {
        dim: file.dim,
        operators: operator_entries(&file),
        pattern: PatternInfo {
            display: search.pattern.to_string(),
            gamma: search.pattern.gamma().to_vec(),
            level: search.pattern.level(),
            unique: search.unique,
            generators: search.generators.iter().map(|g| g.iter().map(|v| v.to_string()).collect()).collect(),
        },
        derivatives: space.derivatives().iter().map(|a| a.to_string()).collect(),
        dim_e: space.dim_e(),
        parity: space.parity().as_str(),
        dependence,
        rank_one_span,
        span_samples: samples,
    })
}

pub fn run(mut args: AnalyzeArgs, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    args.seed.get_or_insert(0);
    let analysis = analyze_file(&args)?;
    args.samples = Some(analysis.span_samples);
    ctx.emit("analyze", &args, analysis, start)?;
    Ok(())
}
