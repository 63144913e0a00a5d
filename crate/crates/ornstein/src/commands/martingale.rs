use std::time::Instant;

use num_traits::ToPrimitive;
use ornstein_core::martingale::{ratio_search, span_test, transform, TransformSequence};
use rayon::prelude::*;
use serde::Serialize;

use super::{parse_f64_list, parse_usize_list, usage, Ctx};
use crate::cli::MartingaleArgs;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct DepthEntry {
    pub depth: usize,
    pub ratio: f64,
    pub origin: &'static str,
    pub martingale_defect: f64,
}

#[derive(Debug, Serialize)]
pub struct TrendRow {
    pub depth: usize,
    pub ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct MartingaleResult {
    pub alphas: Vec<Vec<f64>>,
    pub depth: usize,
    pub trials: usize,
    pub seed: u64,
    pub ratio: f64,
    pub trend: Vec<(usize, f64)>,
    pub span: Option<Vec<String>>,
    /// `Σ|λ_j|` when `α¹` lies in the span of the others.
    pub span_bound: Option<f64>,
    pub entries: Vec<DepthEntry>,
}

pub fn run(mut args: MartingaleArgs, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    let texts = args.alphas.get_or_insert_with(|| vec!["1,0".into(), "0,1".into()]).clone();
    let depths = parse_usize_list(args.depths.get_or_insert_with(|| "8,12,16".into()), ',', "depths")?;
    let trials = *args.trials.get_or_insert(20);
    let seed = *args.seed.get_or_insert(0);
    if texts.len() < 2 {
        return Err(usage("give at least two --alpha sequences"));
    }
    if depths.is_empty() {
        return Err(usage("no depths"));
    }
    let alphas: Vec<TransformSequence> = texts
        .iter()
        .map(|t| Ok(TransformSequence::new(parse_f64_list(t, "alpha")?)?))
        .collect::<CliResult<_>>()?;
    let span = span_test(&alphas)?;
    let entries: Vec<DepthEntry> = depths
        .par_iter()
        .map(|&depth| {
            let found = ratio_search(&alphas, depth, trials, seed)?;
            let defect = alphas.iter().map(|a| transform(a, &found.witness).defect()).fold(0.0f64, f64::max);
            Ok(DepthEntry { depth, ratio: found.ratio, origin: found.origin, martingale_defect: defect })
        })
        .collect::<CliResult<_>>()?;
    let trend: Vec<(usize, f64)> = entries.iter().map(|e| (e.depth, e.ratio)).collect();
    let rows: Vec<TrendRow> = trend.iter().map(|&(depth, ratio)| TrendRow { depth, ratio }).collect();
    ctx.output.write_csv("martingale_trend.csv", &rows)?;
    let deepest = entries.iter().max_by_key(|e| e.depth).expect("non-empty");
    let result = MartingaleResult {
        alphas: alphas.iter().map(|a| a.values().to_vec()).collect(),
        depth: deepest.depth,
        trials,
        seed,
        ratio: deepest.ratio,
        trend,
        span_bound: span.as_ref().map(|l| l.iter().filter_map(|v| v.to_f64()).map(f64::abs).sum()),
        span: span.map(|l| l.iter().map(|v| v.to_string()).collect()),
        entries,
    };
    ctx.emit("martingale", &args, result, start)?;
    Ok(())
}
