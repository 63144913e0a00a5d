//! Acceptance checks shared by `ornstein suite` and the `acceptance` test.

use std::time::Instant;

use num_traits::{Signed, ToPrimitive, Zero};
use ornstein_core::algebra::{
    build_gradient_space, dependence_coefficients, find_pattern, parse_operator, rank_one_span_dim,
    DifferentialOperator, MultiIndex,
};
use ornstein_core::asymptotics::{cp_lower_bound, cp_scan};
use ornstein_core::bellman::{BellmanOptions, BellmanProblem, VFunction};
use ornstein_core::field::{DerivativeScheme, ScalarField};
use ornstein_core::laminate::{laminate_report, LaminateSpec};
use ornstein_core::martingale::{ratio_search, transform, TransformSequence};
use ornstein_core::ratio::{anisotropic_schedule, dyadic_schedule, ratio_trend, RatioOptions};
use ornstein_core::sepconvex::{r4_example, subharmonic_check, HomogeneousGrid, SepConvexProgram};
use ornstein_core::{seeded_rng, Rational, SeededRng};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::commands::r4check::sample_points;

/// Result of one check before timing is applied.
#[derive(Clone, Debug)]
pub struct Observation {
    pub passed: bool,
    pub observed: String,
    pub expected: String,
}

#[derive(Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    /// Exact or symbolic, part of `--fast`.
    pub fast: bool,
    pub limit_seconds: f64,
    pub check: fn() -> Observation,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub observed: String,
    pub expected: String,
    pub seconds: f64,
    pub limit_seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} | expected {} ({:.2} s, limit {} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.observed,
            self.expected,
            self.seconds,
            self.limit_seconds
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "pattern", fast: true, limit_seconds: 1.0, check: pattern_recovery },
        Criterion { id: 2, name: "dependence", fast: true, limit_seconds: 5.0, check: dependence_exactness },
        Criterion { id: 3, name: "rank-one-span", fast: true, limit_seconds: 5.0, check: rank_one_span },
        Criterion { id: 4, name: "disproof-trend", fast: false, limit_seconds: 600.0, check: disproof_trend },
        Criterion { id: 5, name: "dependent-control", fast: false, limit_seconds: 120.0, check: dependent_control },
        Criterion { id: 6, name: "laminate", fast: false, limit_seconds: 30.0, check: laminate_check },
        Criterion { id: 7, name: "sepconvex", fast: true, limit_seconds: 120.0, check: sepconvex_check },
        Criterion { id: 8, name: "r4-example", fast: true, limit_seconds: 10.0, check: r4_check },
        Criterion { id: 9, name: "martingale", fast: true, limit_seconds: 120.0, check: martingale_check },
        Criterion { id: 10, name: "cp-bound", fast: false, limit_seconds: 600.0, check: cp_check },
        Criterion { id: 11, name: "bellman-hygiene", fast: false, limit_seconds: 300.0, check: bellman_check },
    ]
}

pub fn select(fast: bool, filter: Option<&str>) -> Vec<Criterion> {
    criteria()
        .into_iter()
        .filter(|c| !fast || c.fast)
        .filter(|c| filter.is_none_or(|f| c.name.contains(f)))
        .collect()
}

pub fn run_criterion(c: &Criterion) -> Outcome {
    let start = Instant::now();
    let obs = (c.check)();
    let seconds = start.elapsed().as_secs_f64();
    Outcome {
        id: c.id,
        name: c.name,
        passed: obs.passed && seconds <= c.limit_seconds,
        observed: obs.observed,
        expected: obs.expected,
        seconds,
        limit_seconds: c.limit_seconds,
    }
}

fn family(src: &[&str], dim: usize) -> Vec<DifferentialOperator> {
    src.iter().map(|s| parse_operator(s, dim).expect("built-in operator")).collect()
}

fn fail(expected: &str, err: impl std::fmt::Display) -> Observation {
    Observation { passed: false, observed: format!("error: {err}"), expected: expected.into() }
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" -> ")
}

fn pattern_recovery() -> Observation {
    let expected = "gamma (3,2,6), k 12";
    let ops = family(&["d^(2,0,1) - d^(0,3,1)", "d^(4,0,0)", "d^(0,6,0)", "d^(0,0,2)"], 3);
    match find_pattern(&ops) {
        Ok(Some(found)) => Observation {
            passed: found.pattern.gamma() == [3, 2, 6] && found.pattern.level() == 12,
            observed: format!("pattern {}", found.pattern),
            expected: expected.into(),
        },
        Ok(None) => fail(expected, "no pattern"),
        Err(e) => fail(expected, e),
    }
}

/// Rank by plain Gaussian elimination over the rationals.
fn oracle_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &rows[r][c];
            for k in c..cols {
                let delta = &f * &rows[r][k];
                rows[i][k] -= delta;
            }
        }
        r += 1;
    }
    r
}

fn random_operator(rng: &mut SeededRng, basis: &[MultiIndex], name: &str) -> DifferentialOperator {
    loop {
        let terms = basis.iter().map(|a| (a.clone(), q(rng.gen_range(-3..=3))));
        if let Ok(op) = DifferentialOperator::from_terms(2, name, terms) {
            return op;
        }
    }
}

fn dependence_exactness() -> Observation {
    let basis: Vec<MultiIndex> = [[3, 0], [2, 1], [1, 2], [0, 3]].into_iter().map(MultiIndex::from).collect();
    let mut rng = seeded_rng(2024);
    let (mut errors, mut dependent) = (0, 0);
    for k in 0..200 {
        let count = rng.gen_range(2..=3);
        let others: Vec<DifferentialOperator> = (0..count).map(|j| random_operator(&mut rng, &basis, &format!("T{}", j + 2))).collect();
        let t1 = if k % 2 == 0 {
            let parts: Vec<(Rational, &DifferentialOperator)> = others
                .iter()
                .map(|op| (Rational::new(rng.gen_range(-4i64..=4).into(), rng.gen_range(1i64..=4).into()), op))
                .collect();
            match DifferentialOperator::linear_combination("T1", &parts) {
                Ok(op) => op,
                Err(_) => random_operator(&mut rng, &basis, "T1"),
            }
        } else {
            random_operator(&mut rng, &basis, "T1")
        };
        let column = |op: &DifferentialOperator| basis.iter().map(|a| op.coefficient(a)).collect::<Vec<_>>();
        let without = oracle_rank(others.iter().map(column).collect());
        let with = oracle_rank(std::iter::once(&t1).chain(&others).map(column).collect());
        let truth = with == without;
        dependent += truth as usize;
        let mut ops = vec![t1.clone()];
        ops.extend(others.iter().cloned());
        let verdict = match dependence_coefficients(&ops) {
            Ok(Some(lambda)) => {
                let parts: Vec<(Rational, &DifferentialOperator)> = lambda.into_iter().zip(&others).collect();
                // a returned combination must rebuild T1 exactly
                DifferentialOperator::linear_combination("R", &parts).is_ok_and(|r| r.terms() == t1.terms())
            }
            Ok(None) => false,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        errors += (verdict != truth) as usize;
    }
    Observation {
        passed: errors == 0 && dependent > 0 && dependent < 200,
        observed: format!("{errors} errors over 200 families ({dependent} dependent)"),
        expected: "0 errors".into(),
    }
}

fn rank_one_span() -> Observation {
    let mut rng = seeded_rng(77);
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut sizes = Vec::new();
    while checked < 20 {
        let d = rng.gen_range(2..=3);
        let gamma: Vec<u64> = (0..d).map(|_| rng.gen_range(1..=3)).collect();
        let level = rng.gen_range(4..=12);
        let plane = weighted_plane(&gamma, level);
        let Some(first) = plane.choose(&mut rng) else { continue };
        let parity = first.degree() % 2;
        let mut same: Vec<MultiIndex> = plane.iter().filter(|a| a.degree() % 2 == parity).cloned().collect();
        if same.len() < 2 {
            continue;
        }
        same.shuffle(&mut rng);
        same.truncate(rng.gen_range(2..=same.len().min(8)));
        let ops: Vec<DifferentialOperator> =
            same.iter().enumerate().map(|(i, a)| DifferentialOperator::monomial(a.clone(), format!("T{i}"))).collect();
        let Ok(space) = build_gradient_space(&ops) else { continue };
        let size = space.dim_e();
        sizes.push(size);
        match rank_one_span_dim(&space, size + 3, checked as u64) {
            Ok(r) if r == size => {}
            Ok(r) => failures.push(format!("|A|={size} got {r}")),
            Err(e) => failures.push(e.to_string()),
        }
        checked += 1;
    }
    Observation {
        passed: failures.is_empty(),
        observed: if failures.is_empty() { format!("20/20 sets full rank, |A| = {sizes:?}") } else { failures.join("; ") },
        expected: "rank = |A| for all 20 sets".into(),
    }
}

fn weighted_plane(gamma: &[u64], level: u64) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; gamma.len()];
    fn rec(gamma: &[u64], rest: u64, axis: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if axis == gamma.len() {
            if rest == 0 {
                out.push(MultiIndex::new(cur.clone()));
            }
            return;
        }
        for a in 0..=(rest / gamma[axis]) {
            cur[axis] = a as u32;
            rec(gamma, rest - a * gamma[axis], axis + 1, cur, out);
        }
        cur[axis] = 0;
    }
    rec(gamma, level, 0, &mut cur, &mut out);
    out
}

fn trend_ok(r: &[f64]) -> bool {
    r.windows(2).all(|w| w[1] > w[0]) && r.last().unwrap_or(&0.0) / r.first().unwrap_or(&1.0) >= 1.05
}

fn disproof_trend() -> Observation {
    let expected = "strictly increasing, +5% overall, above 0.5 (both families)";
    let opts = RatioOptions { budget: 2000, ..Default::default() };
    let iso = match ratio_trend(&family(&["d1*d2", "d1^2", "d2^2"], 2), &dyadic_schedule(&[32, 32], 3), &opts) {
        Ok(r) => r.iter().map(|r| r.ratio).collect::<Vec<_>>(),
        Err(e) => return fail(expected, e),
    };
    let aniso_ops = family(&["d1^2*d2", "d1^4", "d2^2"], 2);
    let aniso = match ratio_trend(&aniso_ops, &anisotropic_schedule(&[16, 256], &[1, 2], 3), &opts) {
        Ok(r) => r.iter().map(|r| r.ratio).collect::<Vec<_>>(),
        Err(e) => return fail(expected, e),
    };
    Observation {
        passed: trend_ok(&iso) && iso[2] > 0.5 && trend_ok(&aniso),
        observed: format!("32/64/128: {}; 16x256/32x1024/64x4096: {}", fmt_list(&iso), fmt_list(&aniso)),
        expected: expected.into(),
    }
}

fn dependent_control() -> Observation {
    let expected = "every ratio <= 2 + 1e-6 and <= sum|lambda| = 2, flat within 1%";
    let ops = family(&["d1^2 + d2^2", "d1^2", "d2^2"], 2);
    let bound = match dependence_coefficients(&ops) {
        Ok(Some(l)) => l.iter().map(|v| v.abs()).fold(Rational::zero(), |a, b| a + b).to_f64().unwrap_or(f64::NAN),
        other => return fail(expected, format!("dependence not detected: {other:?}")),
    };
    let opts = RatioOptions { budget: 2000, ..Default::default() };
    let ratios = match ratio_trend(&ops, &dyadic_schedule(&[32, 32], 3), &opts) {
        Ok(r) => r.iter().map(|r| r.ratio).collect::<Vec<_>>(),
        Err(e) => return fail(expected, e),
    };
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    Observation {
        passed: max <= 2.0 + 1e-6 && max <= bound && max / min - 1.0 <= 0.01,
        observed: format!("{} (bound {bound})", fmt_list(&ratios)),
        expected: expected.into(),
    }
}

fn laminate_check() -> Observation {
    let expected = "|B| >= 0.9, sup <= |e_x| + 0.05, >= 8 periods, KS <= 0.05";
    let ops = family(&["d1*d2", "d1^2", "d2^2"], 2);
    let space = build_gradient_space(&ops).expect("built-in family");
    let spec = match LaminateSpec::for_delta(vec![1.0, 1.0], space.derivatives()[0].clone(), space.pattern().clone(), 0.1) {
        Ok(s) => s,
        Err(e) => return fail(expected, e),
    };
    let sizes = spec.suggested_sizes(12.0);
    let r = match laminate_report(&space, &spec, &sizes, DerivativeScheme::default()) {
        Ok(r) => r,
        Err(e) => return fail(expected, e),
    };
    let periods_ok = r.periods.iter().all(|p| p.is_some_and(|p| p >= 8));
    Observation {
        passed: r.good_fraction >= 0.9 && r.sup_gradient <= r.ex_norm + 0.05 && periods_ok && r.ks <= 0.05,
        observed: format!(
            "|B| {:.4}, sup {:.4} vs {:.4}, periods {:?}, KS {:.4} (t {}, grid {:?})",
            r.good_fraction,
            r.sup_gradient,
            r.ex_norm + 0.05,
            r.periods.iter().flatten().collect::<Vec<_>>(),
            r.ks,
            spec.t,
            sizes
        ),
        expected: expected.into(),
    }
}

fn sepconvex_check() -> Observation {
    let expected = "optimum >= -1e-6 with certificate, < 60 s each";
    let mut parts = Vec::new();
    let mut passed = true;
    for (d, n, m) in [(2, 17, 3), (3, 9, 2)] {
        let start = Instant::now();
        let sol = HomogeneousGrid::new(d, n, m, 2).and_then(|g| SepConvexProgram::new(g, 1.0)).and_then(|p| p.solve());
        let secs = start.elapsed().as_secs_f64();
        match sol {
            Ok(s) => {
                passed &= s.optimum >= -1e-6 && s.certified(1e-9) && secs < 60.0;
                let exact = s.exact_bound.map_or("none".into(), |b| b.to_string());
                parts.push(format!("d={d}: {:.2e} exact {exact} ({:.2} s)", s.optimum, secs));
            }
            Err(e) => return fail(expected, e),
        }
    }
    Observation { passed, observed: parts.join("; "), expected: expected.into() }
}

fn r4_check() -> Observation {
    let expected = "F(0,0,1,2) = -3, F(lx) = |l|F(x) for l in {-2, 1/2}, |lap| <= 1e-3";
    let value = match r4_example(&[0.0, 0.0, 1.0, 2.0]) {
        Ok(v) => v,
        Err(e) => return fail(expected, e),
    };
    let points = sample_points(100, 0.5, 8);
    let mut exact = true;
    for x in &points {
        let fx = r4_example(x).expect("off the axis");
        for l in [-2.0, 0.5] {
            let y: Vec<f64> = x.iter().map(|v| l * v).collect();
            exact &= r4_example(&y).expect("off the axis") == f64::abs(l) * fx;
        }
    }
    let lap = match subharmonic_check(&points, 1e-2) {
        Ok(v) => v.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Err(e) => return fail(expected, e),
    };
    Observation {
        passed: value == -3.0 && exact && lap <= 1e-3,
        observed: format!("F(0,0,1,2) = {value}, homogeneity exact: {exact}, max |lap| {lap:.2e}"),
        expected: expected.into(),
    }
}

fn martingale_check() -> Observation {
    let expected = "ratio 1 exactly, ratio(16) >= 1.05 ratio(8), defect <= 1e-12";
    let seq = |v: &[f64]| TransformSequence::new(v.to_vec()).expect("non-empty");
    let same = seq(&[1.0, -0.5, 2.0]);
    let equal = match ratio_search(&[same.clone(), same], 12, 20, 0) {
        Ok(r) => r.ratio,
        Err(e) => return fail(expected, e),
    };
    let alphas = [seq(&[1.0, 0.0]), seq(&[0.0, 1.0])];
    let (r8, r16) = match (ratio_search(&alphas, 8, 20, 0), ratio_search(&alphas, 16, 20, 0)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return fail(expected, e),
    };
    let defect = [&r8, &r16]
        .iter()
        .flat_map(|r| alphas.iter().map(|a| transform(a, &r.witness).defect()))
        .fold(0.0f64, f64::max);
    Observation {
        passed: equal == 1.0 && r16.ratio >= 1.05 * r8.ratio && defect <= 1e-12,
        observed: format!("equal {equal}, depth 8 {:.4}, depth 16 {:.4}, defect {defect:.1e}", r8.ratio, r16.ratio),
        expected: expected.into(),
    }
}

/// `sup ξ₁²ξ₂²/(ξ₁⁴+ξ₂⁴)` on the unit circle by a fine angular scan.
fn symbol_sup() -> f64 {
    (0..=200_000)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 200_000.0;
            let (s, c) = t.sin_cos();
            s * s * c * c / (s.powi(4) + c.powi(4))
        })
        .fold(0.0, f64::max)
}

fn cp_check() -> Observation {
    let expected = "p=2 bound >= 0.45, scan non-decreasing within 1%, p=2 entry within 1%";
    let ops = family(&["d1*d2", "d1^2", "d2^2"], 2);
    let oracle = symbol_sup();
    let single = match cp_lower_bound(&ops, 2.0, &[64, 64], 2000, 0) {
        Ok(r) => r.ratio,
        Err(e) => return fail(expected, e),
    };
    let opts = RatioOptions { budget: 2000, seed: 0, ..Default::default() };
    let scan = match cp_scan(&ops, &[2.0, 1.5, 1.25, 1.125], &[64, 64], &opts) {
        Ok(s) => s,
        Err(e) => return fail(expected, e),
    };
    let bounds = scan.bounds();
    Observation {
        passed: single >= 0.45 && scan.non_decreasing(0.01) && (bounds[0] - single).abs() <= 0.01 * single,
        observed: format!(
            "p=2 {single:.4} (symbol sup {oracle:.4}); scan {} (slope {:.3})",
            fmt_list(&bounds),
            scan.slope.unwrap_or(f64::NAN)
        ),
        expected: expected.into(),
    }
}

fn bellman_check() -> Observation {
    let expected = "B(e) <= V(e) + 1e-9 on 100 points, monotone traces, covariance to 1e-9";
    let ops = family(&["d1*d2", "d1^2", "d2^2"], 2);
    let vf = VFunction::new(build_gradient_space(&ops).expect("built-in family"), 0.1, 1.0).expect("valid");
    let problem = match BellmanProblem::new(vf, &[16, 16], DerivativeScheme::default()) {
        Ok(p) => p,
        Err(e) => return fail(expected, e),
    };
    let mut rng = seeded_rng(11);
    let (mut above, mut non_monotone, mut covariance): (usize, usize, f64) = (0, 0, 0.0);
    for k in 0..100u64 {
        let e: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let opts = BellmanOptions { budget: 100, seed: k, ..Default::default() };
        let est = match problem.upper(&e, None, &opts) {
            Ok(v) => v,
            Err(err) => return fail(expected, err),
        };
        above += (est.value > est.v_value + 1e-9) as usize;
        non_monotone += !est.trace.windows(2).all(|w| w[1].1 <= w[0].1) as usize;
        let base = problem.objective(&e, &est.witness).expect("same grid");
        for l in [-2.0, 0.5, 3.0] {
            let le: Vec<f64> = e.iter().map(|v| l * v).collect();
            let lf = ScalarField::from_values(
                est.witness.grid().clone(),
                est.witness.values().iter().map(|v| l * v).collect(),
                None,
            )
            .expect("same grid");
            let scaled = problem.objective(&le, &lf).expect("same grid");
            covariance = covariance.max((scaled - f64::abs(l) * base).abs() / base.abs().max(1.0));
        }
    }
    Observation {
        passed: above == 0 && non_monotone == 0 && covariance <= 1e-9,
        observed: format!("{above} above V, {non_monotone} non-monotone traces, covariance error {covariance:.1e}"),
        expected: expected.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection() {
        assert_eq!(select(false, None).len(), 11);
        let fast: Vec<u8> = select(true, None).iter().map(|c| c.id).collect();
        assert_eq!(fast, [1, 2, 3, 7, 8, 9]);
        let lp: Vec<u8> = select(false, Some("sepconvex")).iter().map(|c| c.id).collect();
        assert_eq!(lp, [7]);
    }

    #[test]
    fn oracle_rank_examples() {
        assert_eq!(oracle_rank(vec![vec![q(1), q(2)], vec![q(2), q(4)]]), 1);
        assert_eq!(oracle_rank(vec![vec![q(0), q(1)], vec![q(1), q(0)]]), 2);
        assert!((symbol_sup() - 0.5).abs() < 1e-9);
    }
}
