//! CPLEX LP text for the node-level separately convex program.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use ornstein_core::sepconvex::SepConvexProgram;

fn var(i: usize) -> String {
    format!("F{i}")
}

/// Minimize `F` at the objective node subject to axis-wise convexity,
/// evenness, layer homogeneity, `F(0) = 0` and `F ≤ ‖x‖_∞^p`.
pub fn to_cplex(prog: &SepConvexProgram) -> String {
    let grid = prog.grid();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "\\ separately convex program: d={} n={} layers={} rho={} p={}",
        grid.dim(),
        grid.resolution(),
        grid.layers(),
        grid.rho(),
        prog.p()
    );
    s.push_str("Minimize\n");
    let _ = writeln!(s, " obj: {}", var(prog.target_node()));
    s.push_str("Subject To\n");
    for (k, tr) in prog.triples().iter().enumerate() {
        let [a, b, c] = tr.nodes;
        let wa = tr.weights[0].to_f64().unwrap_or(f64::NAN);
        let wc = tr.weights[1].to_f64().unwrap_or(f64::NAN);
        let _ = writeln!(s, " cvx{k}: {wa} {} + {wc} {} - {} >= 0", var(a), var(c), var(b));
    }
    for (k, (i, j)) in prog.evenness_pairs().iter().enumerate() {
        let _ = writeln!(s, " even{k}: {} - {} = 0", var(*i), var(*j));
    }
    let factor = (grid.rho() as f64).powf(prog.p());
    for (k, (i, j)) in prog.homogeneity_links().iter().enumerate() {
        let _ = writeln!(s, " hom{k}: {} - {factor} {} = 0", var(*j), var(*i));
    }
    let origin = (0..grid.nodes().len()).find(|&i| grid.layer(i).is_none());
    if let Some(o) = origin {
        let _ = writeln!(s, " origin: {} = 0", var(o));
    }
    s.push_str("Bounds\n");
    for i in 0..grid.nodes().len() {
        if Some(i) == origin {
            let _ = writeln!(s, " {} free", var(i));
        } else {
            let _ = writeln!(s, " -inf <= {} <= {}", var(i), grid.sup_norm(i).powf(prog.p()));
        }
    }
    s.push_str("End\n");
    s
}
