use std::time::Instant;

use ornstein_core::sepconvex::{node_sweep, HomogeneousGrid, SepConvexProgram};
use rayon::prelude::*;
use serde::Serialize;

use super::{parse_f64_list, usage, Ctx};
use crate::cli::SepconvexArgs;
use crate::error::{CliError, CliResult};
use crate::lpformat::to_cplex;

#[derive(Debug, Serialize)]
pub struct Row {
    pub d: usize,
    pub p: f64,
    pub n: usize,
    #[serde(rename = "M")]
    pub layers: usize,
    pub optimum: f64,
    pub status: &'static str,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct Entry {
    pub p: f64,
    pub optimum: f64,
    pub dual_bound: f64,
    pub exact_bound: Option<String>,
    pub certified: bool,
    pub primal_violation: f64,
    pub dual_residual: f64,
    pub rows: usize,
    pub variables: usize,
    pub pivots: usize,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub node: String,
    pub optimum: f64,
}

#[derive(Debug, Serialize)]
pub struct SepconvexResult {
    pub d: usize,
    pub n: usize,
    pub layers: usize,
    pub rho: i64,
    pub nodes: usize,
    pub target: Vec<f64>,
    pub entries: Vec<Entry>,
    pub sweep_minimum: Option<Vec<(f64, f64)>>,
}

pub const CERTIFY_TOL: f64 = 1e-9;

pub fn run(mut args: SepconvexArgs, ctx: &Ctx) -> CliResult<()> {
    let start = Instant::now();
    let d = *args.dim.get_or_insert(2);
    let n = *args.n.get_or_insert(17);
    let layers = *args.layers.get_or_insert(3);
    let rho = *args.rho.get_or_insert(2);
    let ps = parse_f64_list(args.p.get_or_insert_with(|| "1".into()), "p")?;
    let target_text = args.target.get_or_insert_with(|| {
        let mut t = vec!["0"; d];
        t[0] = "1";
        t.join(",")
    });
    let target = parse_f64_list(target_text, "target")?;
    let sweep = *args.sweep.get_or_insert(false);
    if target.len() != d {
        return Err(usage(format!("target has {} entries, expected {d}", target.len())));
    }
    let grid = HomogeneousGrid::new(d, n, layers, rho)?;
    let unit = grid.unit() as f64;
    let target_int: Vec<i64> = target
        .iter()
        .map(|v| {
            let s = v * unit;
            if (s - s.round()).abs() < 1e-9 { Ok(s.round() as i64) } else { Err(usage("target is not a grid node")) }
        })
        .collect::<CliResult<_>>()?;
    if let Some(path) = &args.lp_dump {
        if path.exists() && !ctx.output.overwrite {
            return Err(CliError::Exists(path.clone()));
        }
        let prog = SepConvexProgram::with_target(grid.clone(), ps[0], &target_int)?;
        std::fs::write(path, to_cplex(&prog)).map_err(|e| CliError::io(path, e))?;
    }
    let solved: Vec<(Entry, Row)> = ps
        .par_iter()
        .map(|&p| {
            let t0 = Instant::now();
            let sol = SepConvexProgram::with_target(grid.clone(), p, &target_int)?.solve()?;
            let certified = sol.certified(CERTIFY_TOL);
            let row = Row {
                d,
                p,
                n,
                layers,
                optimum: sol.optimum,
                status: if certified { "certified" } else { "uncertified" },
                seconds: t0.elapsed().as_secs_f64(),
            };
            let entry = Entry {
                p,
                optimum: sol.optimum,
                dual_bound: sol.dual_bound,
                exact_bound: sol.exact_bound.map(|b| b.to_string()),
                certified,
                primal_violation: sol.primal_violation,
                dual_residual: sol.dual_residual,
                rows: sol.rows,
                variables: sol.variables,
                pivots: sol.pivots,
            };
            Ok((entry, row))
        })
        .collect::<CliResult<_>>()?;
    for (e, _) in &solved {
        ctx.note(&format!("p={}: optimum {:.3e} ({} rows, {} variables)", e.p, e.optimum, e.rows, e.variables));
    }
    let (entries, rows): (Vec<Entry>, Vec<Row>) = solved.into_iter().unzip();
    ctx.output.write_csv("sepconvex.csv", &rows)?;
    let sweep_minimum = if sweep {
        let tables: Vec<(f64, Vec<(Vec<f64>, f64)>)> =
            ps.par_iter().map(|&p| Ok((p, node_sweep(&grid, p)?))).collect::<CliResult<_>>()?;
        let rows: Vec<SweepRow> = tables
            .iter()
            .flat_map(|(p, t)| {
                t.iter().map(move |(x, v)| SweepRow {
                    p: *p,
                    node: x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"),
                    optimum: *v,
                })
            })
            .collect();
        ctx.output.write_csv("sepconvex_sweep.csv", &rows)?;
        Some(tables.iter().map(|(p, t)| (*p, t.iter().map(|r| r.1).fold(f64::INFINITY, f64::min))).collect())
    } else {
        None
    };
    let result = SepconvexResult {
        d,
        n,
        layers,
        rho,
        nodes: grid.nodes().len(),
        target,
        entries,
        sweep_minimum,
    };
    ctx.emit("sepconvex", &args, result, start)?;
    Ok(())
}
