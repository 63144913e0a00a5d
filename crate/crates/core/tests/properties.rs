use num_traits::{Signed, Zero};
use ornstein_core::algebra::{
    build_gradient_space, check_homogeneous, dependence_coefficients, find_pattern, parse_operator, rank,
    rank_one_vector, DifferentialOperator, MultiIndex,
};
use ornstein_core::bellman::{BellmanProblem, VFunction};
use ornstein_core::field::{DerivativeScheme, ScalarField};
use ornstein_core::martingale::{span_test, transform, transform_ratio, FiniteMartingale, TransformSequence};
use ornstein_core::ratio::RatioProblem;
use ornstein_core::sepconvex::{HomogeneousGrid, SepConvexProgram};
use ornstein_core::Rational;
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// All `α` with `⟨α, γ⟩ = k`.
fn plane(gamma: &[u64], k: u64) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; gamma.len()];
    fn rec(gamma: &[u64], k: u64, axis: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if axis == gamma.len() {
            if k == 0 {
                out.push(MultiIndex::new(cur.clone()));
            }
            return;
        }
        let mut a = 0;
        while a as u64 * gamma[axis] <= k {
            cur[axis] = a;
            rec(gamma, k - a as u64 * gamma[axis], axis + 1, cur, out);
            a += 1;
        }
        cur[axis] = 0;
    }
    rec(gamma, k, 0, &mut cur, &mut out);
    out
}

fn op_from(dim: usize, terms: &[(MultiIndex, i64)]) -> Option<DifferentialOperator> {
    DifferentialOperator::from_terms(dim, "T", terms.iter().map(|(a, c)| (a.clone(), q(*c)))).ok()
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-5i64..=-1, 1i64..=5]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pattern_is_exact(gamma in prop::collection::vec(1u64..=3, 2..=3), k in 2u64..=9,
                        picks in prop::collection::vec((any::<prop::sample::Index>(), nonzero()), 2..8)) {
        let plane = plane(&gamma, k);
        prop_assume!(!plane.is_empty());
        let terms: Vec<(MultiIndex, i64)> = picks.iter().map(|(i, c)| (i.get(&plane).clone(), *c)).collect();
        let (first, rest) = terms.split_at(terms.len() / 2);
        let ops: Vec<_> = [first, rest].iter().filter_map(|t| op_from(gamma.len(), t)).collect();
        prop_assume!(!ops.is_empty());
        let found = find_pattern(&ops).unwrap().expect("a pattern exists");
        for op in &ops {
            prop_assert!(check_homogeneous(op, &found.pattern));
            for alpha in op.newton_diagram() {
                prop_assert_eq!(alpha.weighted_degree(found.pattern.gamma()), found.pattern.level());
            }
        }
    }

    #[test]
    fn dependence_is_sound(c2 in prop::collection::vec(-3i64..=3, 3), c3 in prop::collection::vec(-3i64..=3, 3),
                           l in (nonzero(), nonzero()), free in prop::collection::vec(-3i64..=3, 3), combine in any::<bool>()) {
        let basis = plane(&[1, 1], 2);
        let mk = |c: &[i64]| op_from(2, &basis.iter().cloned().zip(c.iter().copied()).collect::<Vec<_>>());
        let (Some(t2), Some(t3)) = (mk(&c2), mk(&c3)) else { return Ok(()) };
        let t1 = if combine {
            DifferentialOperator::linear_combination("T1", &[(q(l.0), &t2), (q(l.1), &t3)]).ok()
        } else {
            mk(&free)
        };
        let Some(t1) = t1 else { return Ok(()) };
        let ops = [t1.clone(), t2.clone(), t3.clone()];
        let column = |op: &DifferentialOperator| basis.iter().map(|a| op.coefficient(a)).collect::<Vec<_>>();
        match dependence_coefficients(&ops).unwrap() {
            Some(lambda) => {
                let rebuilt = DifferentialOperator::linear_combination("R", &[(lambda[0].clone(), &t2), (lambda[1].clone(), &t3)]);
                let rebuilt = rebuilt.unwrap();
                prop_assert_eq!(rebuilt.terms(), t1.terms());
            }
            None => {
                prop_assert!(!combine);
                let without = rank(&[column(&t2), column(&t3)]);
                let with = rank(&[column(&t1), column(&t2), column(&t3)]);
                prop_assert!(with > without);
            }
        }
    }

    #[test]
    fn rank_one_sign_law(x in prop::collection::vec(-3.0f64..3.0, 2), a in 0usize..3, b in 0usize..3) {
        // γ = (1,3), k = 6: degrees 6, 4, 2 share parity
        let ops: Vec<_> = ["d1^6", "d1^3*d2", "d2^2"].iter().map(|s| parse_operator(s, 2).unwrap()).collect();
        let space = build_gradient_space(&ops).unwrap();
        let (a0, b0) = (&space.derivatives()[a], &space.derivatives()[b]);
        let va = rank_one_vector(&space, &x, a0).unwrap();
        let vb = rank_one_vector(&space, &x, b0).unwrap();
        let diff = (a0.degree() as i64 - b0.degree() as i64) / 2;
        let sign = if diff % 2 == 0 { 1.0 } else { -1.0 };
        for (u, v) in va.coords.iter().zip(&vb.coords) {
            prop_assert_eq!(*u, sign * v);
        }
    }

    #[test]
    fn display_parse_round_trip(dim in 1usize..=3,
                                terms in prop::collection::vec((prop::collection::vec(0u32..=4, 3), nonzero(), 1i64..=7), 1..5)) {
        let op = DifferentialOperator::from_terms(
            dim,
            "T",
            terms.iter().map(|(a, n, d)| (MultiIndex::new(a[..dim].to_vec()), Rational::new((*n).into(), (*d).into()))),
        );
        prop_assume!(op.is_ok());
        let op = op.unwrap();
        prop_assume!(op.newton_diagram().all(|a| a.degree() > 0));
        let back = parse_operator(&op.to_string(), dim).unwrap();
        prop_assert_eq!(back.terms(), op.terms());
    }

    #[test]
    fn transform_is_linear(h in prop::collection::vec(-4i32..=4, 1..64), al in prop::collection::vec(-3i32..=3, 1..4),
                           be in prop::collection::vec(-3i32..=3, 1..4), a in -3i32..=3, b in -3i32..=3) {
        let depth = (usize::BITS - h.len().leading_zeros()) as usize;
        let coeffs: Vec<Vec<f64>> = (0..depth).map(|n| (0..1usize << n).map(|k| h[(k + n) % h.len()] as f64).collect()).collect();
        let f = FiniteMartingale::from_haar(1.0, &coeffs).unwrap();
        let alpha = TransformSequence::new(al.iter().map(|v| *v as f64).collect()).unwrap();
        let beta = TransformSequence::new(be.iter().map(|v| *v as f64).collect()).unwrap();
        let period = al.len() * be.len();
        let mix = TransformSequence::new((0..period).map(|n| a as f64 * alpha.at(n) + b as f64 * beta.at(n)).collect()).unwrap();
        let lhs = transform(&mix, &f);
        let (ta, tb) = (transform(&alpha, &f), transform(&beta, &f));
        prop_assert_eq!(lhs.defect(), 0.0);
        for n in 0..=depth {
            for ((l, x), y) in lhs.level(n).iter().zip(ta.level(n)).zip(tb.level(n)) {
                prop_assert_eq!(*l, a as f64 * x + b as f64 * y);
            }
        }
    }

    #[test]
    fn span_is_sound(a2 in prop::collection::vec(-3i32..=3, 1..4), a3 in prop::collection::vec(-3i32..=3, 1..4),
                     l2 in -3i32..=3, l3 in -3i32..=3, h in prop::collection::vec(-2.0f64..2.0, 1..9)) {
        let s2 = TransformSequence::new(a2.iter().map(|v| *v as f64).collect()).unwrap();
        let s3 = TransformSequence::new(a3.iter().map(|v| *v as f64).collect()).unwrap();
        let period = a2.len() * a3.len();
        let s1 = TransformSequence::new((0..period).map(|n| l2 as f64 * s2.at(n) + l3 as f64 * s3.at(n)).collect()).unwrap();
        let lambda = span_test(&[s1.clone(), s2.clone(), s3.clone()]).unwrap().expect("in the span");
        let lf: Vec<f64> = lambda.iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap()).collect();
        let coeffs: Vec<Vec<f64>> = (0..6).map(|n| (0..1usize << n).map(|k| h[(3 * k + n) % h.len()]).collect()).collect();
        let f = FiniteMartingale::from_haar(0.0, &coeffs).unwrap();
        let (t1, t2, t3) = (transform(&s1, &f), transform(&s2, &f), transform(&s3, &f));
        for ((x, y), z) in t1.level(6).iter().zip(t2.level(6)).zip(t3.level(6)) {
            prop_assert!((x - lf[0] * y - lf[1] * z).abs() <= 1e-9 * (1.0 + x.abs()));
        }
        if let Some(r) = transform_ratio(&[s1, s2, s3], &coeffs) {
            let bound: f64 = lf.iter().map(|v| v.abs()).sum();
            prop_assert!(r <= bound + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn objective_scale_covariance(e in prop::collection::vec(-2.0f64..2.0, 3), seed in any::<u64>(), c in 0.0f64..1.0) {
        let ops: Vec<_> = ["d1*d2", "d1^2", "d2^2"].iter().map(|s| parse_operator(s, 2).unwrap()).collect();
        let vf = VFunction::new(build_gradient_space(&ops).unwrap(), c, 1.0).unwrap();
        let prob = BellmanProblem::new(vf, &[12, 12], DerivativeScheme::default()).unwrap();
        let base = prob.noise(1.0, seed);
        let f = ScalarField::from_values(prob.zero_field().grid().clone(), base.clone(), None).unwrap();
        let value = prob.objective(&e, &f).unwrap();
        for lambda in [-2.0, -1.0, 0.5, 3.0] {
            let le: Vec<f64> = e.iter().map(|v| lambda * v).collect();
            let lf = ScalarField::from_values(f.grid().clone(), base.iter().map(|v| lambda * v).collect(), None).unwrap();
            let scaled = prob.objective(&le, &lf).unwrap();
            prop_assert!((scaled - f64::abs(lambda) * value).abs() <= 1e-9 * (1.0 + value.abs()));
        }
    }

    #[test]
    fn dependent_ratio_bound(l2 in prop_oneof![-3i64..=-1, 1i64..=3], l3 in prop_oneof![-3i64..=-1, 1i64..=3],
                             values in prop::collection::vec(-1.0f64..1.0, 256)) {
        let t2 = parse_operator("d1^2", 2).unwrap();
        let t3 = parse_operator("d2^2", 2).unwrap();
        let t1 = DifferentialOperator::linear_combination("T1", &[(q(l2), &t2), (q(l3), &t3)]).unwrap();
        let lambda = dependence_coefficients(&[t1.clone(), t2.clone(), t3.clone()]).unwrap().unwrap();
        let bound: Rational = lambda.iter().map(|v| v.abs()).fold(Rational::zero(), |a, b| a + b);
        let bound = num_traits::ToPrimitive::to_f64(&bound).unwrap();
        let space = build_gradient_space(&[t1, t2, t3]).unwrap();
        let problem = RatioProblem::new(&space, &[16, 16], DerivativeScheme::default(), 1.0).unwrap();
        let masked: Vec<f64> = values.iter().zip(problem.stack().mask()).map(|(v, m)| v * m).collect();
        if let Some(r) = problem.ratio(&masked, &mut problem.stack().buffers()) {
            prop_assert!(r <= bound + 1e-9, "{} > {}", r, bound);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn nested_grids_certify_monotonically(c in prop::collection::vec(-2i64..=2, 2)) {
        prop_assume!(c.iter().any(|v| v.abs() == 2));
        let coarse = HomogeneousGrid::new(2, 5, 1, 2).unwrap();
        let fine = HomogeneousGrid::new(2, 9, 1, 2).unwrap();
        let to_coarse: Vec<i64> = c.iter().map(|v| v * coarse.unit() / 2).collect();
        let to_fine: Vec<i64> = c.iter().map(|v| v * fine.unit() / 2).collect();
        let lo = SepConvexProgram::with_target(coarse, 1.0, &to_coarse).unwrap().solve().unwrap();
        let hi = SepConvexProgram::with_target(fine, 1.0, &to_fine).unwrap().solve().unwrap();
        prop_assert!(hi.optimum >= lo.optimum - 1e-9, "{} < {}", hi.optimum, lo.optimum);
    }
}
