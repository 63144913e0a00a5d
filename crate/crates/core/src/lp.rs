//! Dense simplex for `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`, with `b ≥ 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// Multipliers of the rows; `y ≥ 0`, `Aᵀy ≥ c` at optimality.
    pub y: Vec<f64>,
    /// Structural columns that are basic at the optimum.
    pub basic_columns: Vec<usize>,
    /// Rows whose slack is nonbasic at the optimum.
    pub tight_rows: Vec<usize>,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexOptions {
    pub max_pivots: usize,
    pub tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_switch: usize,
    /// Smallest admissible pivot, relative to the column's largest entry.
    pub pivot_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_pivots: 100_000, tol: 1e-9, degenerate_switch: 50, pivot_tol: 1e-7 }
    }
}

const FLUSH: f64 = 1e-13;

/// Condensed tableau: row `i` reads `basic_i = rhs_i − Σ_k t[i][k]·nonbasic_k`,
/// the last row is the objective `z = rhs − Σ_k t[m][k]·nonbasic_k`.
struct Tableau {
    m: usize,
    n: usize,
    t: Vec<f64>,
    rhs: Vec<f64>,
    // labels: structural j → j, slack i → n + i
    row_label: Vec<usize>,
    col_label: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, k: usize) -> f64 {
        self.t[i * self.n + k]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let n = self.n;
        let p = self.at(r, j);
        let inv = 1.0 / p;
        let pivot_row: Vec<f64> = self.t[r * n..(r + 1) * n].to_vec();
        let rb = self.rhs[r];
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * n + j];
            if f == 0.0 {
                continue;
            }
            let q = f * inv;
            let row = &mut self.t[i * n..(i + 1) * n];
            for (v, pr) in row.iter_mut().zip(&pivot_row) {
                *v -= q * pr;
                if v.abs() < FLUSH {
                    *v = 0.0;
                }
            }
            row[j] = -q;
            self.rhs[i] -= q * rb;
        }
        let row = &mut self.t[r * n..(r + 1) * n];
        row.iter_mut().for_each(|v| *v *= inv);
        row[j] = inv;
        self.rhs[r] = rb * inv;
        core::mem::swap(&mut self.row_label[r], &mut self.col_label[j]);
    }
}

pub fn solve_max(lp: &LpProblem, opts: &SimplexOptions) -> Result<LpSolution> {
    let m = lp.a.len();
    let n = lp.c.len();
    if lp.b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: lp.b.len() });
    }
    if let Some(row) = lp.a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: row.len() });
    }
    let worst = lp.b.iter().cloned().fold(0.0f64, f64::min);
    if worst < -opts.tol {
        return Err(Error::LpInfeasible { violation: -worst });
    }
    let mut t = Vec::with_capacity((m + 1) * n);
    for row in &lp.a {
        t.extend_from_slice(row);
    }
    t.extend(lp.c.iter().map(|c| -c));
    let mut rhs: Vec<f64> = lp.b.iter().map(|v| v.max(0.0)).collect();
    rhs.push(0.0);
    let mut tab = Tableau { m, n, t, rhs, row_label: (n..n + m).collect(), col_label: (0..n).collect() };
    let mut pivots = 0;
    let mut degenerate_run = 0;
    loop {
        let bland = degenerate_run >= opts.degenerate_switch;
        let mut enter: Option<usize> = None;
        for k in 0..n {
            let d = tab.at(m, k);
            if d < -opts.tol {
                enter = match enter {
                    None => Some(k),
                    Some(e) if bland && tab.col_label[k] < tab.col_label[e] => Some(k),
                    Some(e) if !bland && d < tab.at(m, e) => Some(k),
                    keep => keep,
                };
            }
        }
        let Some(j) = enter else { break };
        // Harris two-pass ratio test: bound the step with a small primal
        // tolerance, then take the largest pivot among the admissible rows
        let col_max = (0..m).map(|i| tab.at(i, j).abs()).fold(0.0f64, f64::max);
        let piv_tol = opts.pivot_tol * col_max.max(1.0);
        let mut theta = f64::INFINITY;
        for i in 0..m {
            let a = tab.at(i, j);
            if a > piv_tol {
                theta = theta.min((tab.rhs[i].max(0.0) + opts.tol) / a);
            }
        }
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = tab.at(i, j);
            if a > piv_tol && tab.rhs[i].max(0.0) / a <= theta {
                let better = match leave {
                    None => true,
                    Some((r, _)) if bland => tab.row_label[i] < tab.row_label[r],
                    Some((r, _)) => a > tab.at(r, j),
                };
                if better {
                    leave = Some((i, tab.rhs[i].max(0.0) / a));
                }
            }
        }
        let Some((r, ratio)) = leave else { return Err(Error::LpUnbounded) };
        if pivots >= opts.max_pivots {
            return Err(Error::LpIterationLimit(pivots));
        }
        degenerate_run = if ratio <= opts.tol { degenerate_run + 1 } else { 0 };
        tab.pivot(r, j);
        pivots += 1;
    }
    let mut x = vec![0.0; n];
    let mut basic_columns = Vec::new();
    for i in 0..m {
        if tab.row_label[i] < n {
            x[tab.row_label[i]] = tab.rhs[i];
            basic_columns.push(tab.row_label[i]);
        }
    }
    let mut y = vec![0.0; m];
    let mut tight_rows = Vec::new();
    for k in 0..n {
        if tab.col_label[k] >= n {
            let i = tab.col_label[k] - n;
            y[i] = tab.at(m, k).max(0.0);
            tight_rows.push(i);
        }
    }
    basic_columns.sort_unstable();
    tight_rows.sort_unstable();
    Ok(LpSolution { value: tab.rhs[m], x, y, basic_columns, tight_rows, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let lp = LpProblem {
            a: vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            b: vec![4.0, 12.0, 18.0],
            c: vec![3.0, 5.0],
        };
        let s = solve_max(&lp, &SimplexOptions::default()).unwrap();
        assert!((s.value - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        // dual (0, 3/2, 1)
        let dual: f64 = s.y.iter().zip(&lp.b).map(|(y, b)| y * b).sum();
        assert!((dual - 36.0).abs() < 1e-12);
        assert!((s.y[1] - 1.5).abs() < 1e-12 && (s.y[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_and_infeasible() {
        let lp = LpProblem { a: vec![vec![1.0, -1.0]], b: vec![1.0], c: vec![0.0, 1.0] };
        assert_eq!(solve_max(&lp, &SimplexOptions::default()), Err(Error::LpUnbounded));
        let lp = LpProblem { a: vec![vec![1.0]], b: vec![-1.0], c: vec![1.0] };
        assert!(matches!(solve_max(&lp, &SimplexOptions::default()), Err(Error::LpInfeasible { .. })));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example, which cycles under the largest-coefficient rule
        let lp = LpProblem {
            a: vec![
                vec![0.25, -8.0, -1.0, 9.0],
                vec![0.5, -12.0, -0.5, 3.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            b: vec![0.0, 0.0, 1.0],
            c: vec![0.75, -20.0, 0.5, -6.0],
        };
        let s = solve_max(&lp, &SimplexOptions { degenerate_switch: 3, ..Default::default() }).unwrap();
        assert!((s.value - 1.25).abs() < 1e-12, "{}", s.value);
    }
}
