use ornstein_core::algebra::{build_gradient_space, dependence_coefficients, find_pattern, parse_operator, rank_one_span_dim};
use ornstein_core::bellman::{bellman_upper, check_rank_one_midpoint, BellmanOptions, VFunction};
use ornstein_core::algebra::rank_one_vector;
use ornstein_core::field::DerivativeScheme;
use ornstein_core::laminate::{laminate_report, LaminateSpec};
use ornstein_core::martingale::{ratio_search, TransformSequence};
use ornstein_core::ratio::{dyadic_schedule, ratio_trend, RatioOptions};
use ornstein_core::sepconvex::{
    check_separately_convex, min_certificate, r4_example, HomogeneousGrid, SepConvexProgram,
};
use ornstein_core::algebra::{DifferentialOperator, MultiIndex};

fn family(src: &[&str], dim: usize) -> Vec<DifferentialOperator> {
    src.iter().map(|s| parse_operator(s, dim).unwrap()).collect()
}

#[test]
fn three_variable_end_to_end() {
    let ops = family(&["d^(2,0,1) - d^(0,3,1)", "d^(4,0,0)", "d^(0,6,0)", "d^(0,0,2)"], 3);
    let found = find_pattern(&ops).unwrap().unwrap();
    assert_eq!(found.pattern.gamma(), &[3, 2, 6]);
    assert_eq!(found.pattern.level(), 12);
    assert_eq!(dependence_coefficients(&ops).unwrap(), None);
    let space = build_gradient_space(&ops).unwrap();
    let listed: Vec<MultiIndex> =
        [[0, 0, 2], [0, 6, 0], [4, 0, 0], [0, 3, 1], [2, 0, 1]].into_iter().map(MultiIndex::from).collect();
    assert_eq!(space.dim_e(), listed.len());
    assert!(listed.iter().all(|a| space.position(a).is_some()));
}

#[test]
fn hessian_family_span_and_convexity_directions() {
    let ops = family(&["d1*d2", "d1^2", "d2^2"], 2);
    let space = build_gradient_space(&ops).unwrap();
    assert_eq!(rank_one_span_dim(&space, 6, 0).unwrap(), 3);
    let dir = rank_one_vector(&space, &[1.0, 2.0], &MultiIndex::from([2, 0])).unwrap();
    let norm2 = |e: &[f64]| e.iter().map(|v| v * v).sum::<f64>();
    let r = check_rank_one_midpoint(norm2, &[0.3, -0.1, 0.2], &dir.coords, &[0.5, 1.0]);
    assert!(r.within(1e-12));
}

#[test]
fn short_trend_and_estimator() {
    let ops = family(&["d1*d2", "d1^2", "d2^2"], 2);
    let opts = RatioOptions { budget: 200, ..Default::default() };
    let runs = ratio_trend(&ops, &dyadic_schedule(&[16, 16], 2), &opts).unwrap();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r.ratio > 0.0 && r.ratio.is_finite()));
    let vf = VFunction::new(build_gradient_space(&ops).unwrap(), 0.5, 1.0).unwrap();
    let est = bellman_upper(&vf, &[1.0, -1.0, 0.5], &[16, 16], &BellmanOptions { budget: 60, ..Default::default() }).unwrap();
    assert!(est.value <= est.v_value + 1e-9);
}

#[test]
fn laminate_small_grid() {
    let ops = family(&["d1*d2", "d1^2", "d2^2"], 2);
    let space = build_gradient_space(&ops).unwrap();
    let spec = LaminateSpec {
        x: vec![1.0, 1.0],
        alpha0: MultiIndex::from([1, 1]),
        t: 300,
        delta_prime: 0.03,
        pattern: space.pattern().clone(),
    };
    let sizes = spec.suggested_sizes(12.0);
    let r = laminate_report(&space, &spec, &sizes, DerivativeScheme::default()).unwrap();
    assert!((r.good_fraction - r.good_measure).abs() < 0.02);
    assert!(r.ks <= 0.05, "ks {}", r.ks);
}

#[test]
fn separate_convexity_programs() {
    let sol = min_certificate(&SepConvexProgram::new(HomogeneousGrid::new(2, 17, 3, 2).unwrap(), 1.0).unwrap()).unwrap();
    assert!(sol.optimum >= -1e-6);
    assert!(sol.certified(1e-9));
    let norm_inf = |x: &[f64]| x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert_eq!(check_separately_convex(norm_inf, 2, 4, 0.25), 0.0);
    assert_eq!(r4_example(&[0.0, 0.0, 1.0, 2.0]).unwrap(), -3.0);
}

#[test]
fn lacunary_martingale() {
    let alphas = [TransformSequence::new(vec![1.0, 0.0]).unwrap(), TransformSequence::new(vec![0.0, 1.0]).unwrap()];
    let r6 = ratio_search(&alphas, 6, 4, 0).unwrap();
    let r10 = ratio_search(&alphas, 10, 4, 0).unwrap();
    assert!(r10.ratio > r6.ratio);
}
