use std::time::Instant;

use ornstein_core::algebra::{build_gradient_space, MultiIndex};
use ornstein_core::laminate::{laminate_report, LaminateSpec};
use serde::Serialize;

use super::{operator_entries, parse_f64_list, parse_grid, parse_scheme, parse_usize_list, require_ops, usage, Ctx, OperatorEntry};
use crate::cli::LaminateArgs;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct LaminateResult {
    pub operators: Vec<OperatorEntry>,
    pub pattern: String,
    pub x: Vec<f64>,
    pub alpha0: String,
    pub t: u64,
    pub delta_prime: f64,
    pub grid: Vec<usize>,
    pub periods: Vec<Option<u64>>,
    pub good_fraction: f64,
    pub good_measure: f64,
    pub sup_gradient: f64,
    pub ex_norm: f64,
    pub sup_excess: f64,
    pub ks: f64,
    pub identity_residual: f64,
}

pub fn run(mut args: LaminateArgs, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    let (_, file) = require_ops(&args.ops)?;
    let space = build_gradient_space(&file.operators)?;
    let x = parse_f64_list(args.x.get_or_insert_with(|| vec!["1"; file.dim].join(",")), "x")?;
    if x.len() != file.dim {
        return Err(usage(format!("x has {} entries, expected {}", x.len(), file.dim)));
    }
    let alpha0 = match &args.alpha0 {
        Some(text) => MultiIndex::new(
            parse_usize_list(text, ',', "alpha0")?.into_iter().map(|v| v as u32).collect::<Vec<_>>(),
        ),
        None => space.derivatives()[0].clone(),
    };
    args.alpha0 = Some(alpha0.entries().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
    let delta = *args.delta.get_or_insert(0.1);
    let mut spec = LaminateSpec::for_delta(x.clone(), alpha0.clone(), space.pattern().clone(), delta)?;
    if let Some(t) = args.t {
        spec.t = t;
    }
    if let Some(d) = args.delta_prime {
        spec.delta_prime = d;
    }
    let ppp = *args.points_per_period.get_or_insert(12.0);
    let sizes = match &args.grid {
        Some(g) => parse_grid(g, file.dim)?,
        None => spec.suggested_sizes(ppp),
    };
    let scheme = parse_scheme(args.scheme.get_or_insert_with(|| "fd4".into()))?;
    let r = laminate_report(&space, &spec, &sizes, scheme)?;
    ctx.note(&format!("|B| {:.4}, sup {:.4} vs |e_x| {:.4}, KS {:.4}", r.good_fraction, r.sup_gradient, r.ex_norm, r.ks));
    let result = LaminateResult {
        operators: operator_entries(&file),
        pattern: space.pattern().to_string(),
        x,
        alpha0: alpha0.to_string(),
        t: spec.t,
        delta_prime: spec.delta_prime,
        grid: sizes,
        periods: r.periods,
        good_fraction: r.good_fraction,
        good_measure: r.good_measure,
        sup_gradient: r.sup_gradient,
        ex_norm: r.ex_norm,
        sup_excess: r.sup_gradient - r.ex_norm,
        ks: r.ks,
        identity_residual: r.identity_residual,
    };
    ctx.emit("laminate", &args, result, start)?;
    Ok(())
}
