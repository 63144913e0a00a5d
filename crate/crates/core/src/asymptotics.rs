//! Lower bounds for the best constant `c_p` in `‖T₁f‖_p^p ≤ c_p Σ_{j≥2}‖T_jf‖_p^p`.

use alloc::format;
use alloc::vec::Vec;

// float methods without std
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::algebra::{build_gradient_space, DifferentialOperator};
use crate::field::ScalarField;
use crate::ratio::{RatioOptions, RatioProblem, RatioRun};
use crate::stats::slope;
use crate::{Error, Result};

/// One entry of a scan: the achieved ratio is a lower bound for `c_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct CpEntry {
    pub p: f64,
    pub bound: f64,
    pub iterations: usize,
    pub witness: ScalarField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpScan {
    pub sizes: Vec<usize>,
    pub entries: Vec<CpEntry>,
    /// Least-squares slope of `log bound` against `log 1/(p−1)`.
    pub slope: Option<f64>,
}

impl CpScan {
    pub fn bounds(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.bound).collect()
    }

    /// True when each bound is at least `(1 − slack)` times the previous one.
    pub fn non_decreasing(&self, slack: f64) -> bool {
        self.entries.windows(2).all(|w| w[1].bound >= (1.0 - slack) * w[0].bound)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("exponent must be > 1, got {p}")))
    }
}

fn options(p: f64, budget: usize, seed: u64, base: &RatioOptions) -> RatioOptions {
    RatioOptions { p, budget, seed, ..base.clone() }
}

/// Cold-started search for `‖T₁f‖_p^p / Σ_{j≥2}‖T_jf‖_p^p` on one grid.
pub fn cp_lower_bound(
    ops: &[DifferentialOperator],
    p: f64,
    sizes: &[usize],
    budget: usize,
    seed: u64,
) -> Result<RatioRun> {
    cp_lower_bound_with(ops, p, sizes, &options(p, budget, seed, &RatioOptions::default()))
}

pub fn cp_lower_bound_with(ops: &[DifferentialOperator], p: f64, sizes: &[usize], opts: &RatioOptions) -> Result<RatioRun> {
    check_p(p)?;
    let space = build_gradient_space(ops)?;
    RatioProblem::new(&space, sizes, opts.scheme, p)?.maximize(None, &options(p, opts.budget, opts.seed, opts))
}

/// Runs `p_list` in order on one grid; every entry after the first starts
/// from the previous witness.
pub fn cp_scan(ops: &[DifferentialOperator], p_list: &[f64], sizes: &[usize], opts: &RatioOptions) -> Result<CpScan> {
    cp_scan_with(ops, p_list, sizes, opts, |_| {})
}

/// [`cp_scan`] with a callback after each exponent.
pub fn cp_scan_with(
    ops: &[DifferentialOperator],
    p_list: &[f64],
    sizes: &[usize],
    opts: &RatioOptions,
    mut on_entry: impl FnMut(&CpEntry),
) -> Result<CpScan> {
    if p_list.is_empty() {
        return Err(Error::EmptyInput("exponent list"));
    }
    for p in p_list {
        check_p(*p)?;
    }
    if p_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("exponents must decrease toward 1".into()));
    }
    let space = build_gradient_space(ops)?;
    let mut entries: Vec<CpEntry> = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let problem = RatioProblem::new(&space, sizes, opts.scheme, p)?;
        let run_opts = options(p, opts.budget, opts.seed, opts);
        let run = problem.maximize(entries.last().map(|e| e.witness.values()), &run_opts)?;
        entries.push(CpEntry { p, bound: run.ratio, iterations: run.iterations, witness: run.witness });
        on_entry(entries.last().expect("just pushed"));
    }
    let x: Vec<f64> = entries.iter().map(|e| (1.0 / (e.p - 1.0)).ln()).collect();
    let y: Vec<f64> = entries.iter().map(|e| e.bound.ln()).collect();
    Ok(CpScan { sizes: sizes.to_vec(), entries, slope: slope(&x, &y) })
}

/// `p_m = 1 + 2^{−m}` for `m = 0..count`.
pub fn geometric_exponents(count: usize) -> Vec<f64> {
    (0..count).map(|m| 1.0 + (0.5f64).powi(m as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_operator;

    fn family(src: &[&str]) -> Vec<DifferentialOperator> {
        src.iter().map(|s| parse_operator(s, 2).unwrap()).collect()
    }

    #[test]
    fn equal_operators_give_one() {
        let ops = family(&["d1^2", "d1^2"]);
        let run = cp_lower_bound(&ops, 1.5, &[16, 16], 50, 1).unwrap();
        assert_eq!(run.ratio, 1.0);
    }

    #[test]
    fn rejects_p_at_most_one() {
        let ops = family(&["d1^2", "d2^2"]);
        assert!(matches!(cp_lower_bound(&ops, 1.0, &[16, 16], 10, 0), Err(Error::Config(_))));
        let opts = RatioOptions::default();
        assert!(cp_scan(&ops, &[1.5, 2.0], &[16, 16], &opts).is_err());
    }

    #[test]
    fn exponents() {
        assert_eq!(geometric_exponents(3), [2.0, 1.5, 1.25]);
    }
}
