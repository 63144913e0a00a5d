use std::time::Instant;

use ornstein_core::sepconvex::{r4_example, subharmonic_check};
use ornstein_core::seeded_rng;
use rand::Rng;
use serde::Serialize;

use super::{usage, Ctx};
use crate::cli::R4Args;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct R4Result {
    pub value_0012: f64,
    pub value_1000: f64,
    pub points: usize,
    pub max_abs_laplacian: f64,
    pub max_homogeneity_residual: f64,
}

/// Uniform points of `[−2, 2]⁴` with `√(x₁²+x₂²+x₃²) ≥ rmin`.
pub fn sample_points(count: usize, rmin: f64, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() >= rmin {
            out.push(x);
        }
    }
    out
}

pub fn homogeneity_residual(points: &[[f64; 4]], lambdas: &[f64]) -> CliResult<f64> {
    let mut worst: f64 = 0.0;
    for x in points {
        let fx = r4_example(x)?;
        for &l in lambdas {
            let y: Vec<f64> = x.iter().map(|v| l * v).collect();
            worst = worst.max((r4_example(&y)? - l.abs() * fx).abs() / (1.0 + fx.abs()));
        }
    }
    Ok(worst)
}

pub fn run(mut args: R4Args, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    let count = *args.points.get_or_insert(100);
    let h = *args.h.get_or_insert(1e-2);
    let rmin = *args.rmin.get_or_insert(0.5);
    let seed = *args.seed.get_or_insert(0);
    if !(rmin > 4.0 * h) {
        return Err(usage("rmin must exceed the stencil reach 4h"));
    }
    let points = sample_points(count, rmin, seed);
    let lap = subharmonic_check(&points, h)?;
    let result = R4Result {
        value_0012: r4_example(&[0.0, 0.0, 1.0, 2.0])?,
        value_1000: r4_example(&[1.0, 0.0, 0.0, 0.0])?,
        points: count,
        max_abs_laplacian: lap.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        max_homogeneity_residual: homogeneity_residual(&points, &[-2.0, 0.5, 3.0])?,
    };
    ctx.emit("r4check", &args, result, start)?;
    Ok(())
}
