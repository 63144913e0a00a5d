use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::Rng;

use super::operator::rational_to_f64;
use super::{find_pattern, linalg, DifferentialOperator, HomogeneityPattern, MultiIndex};
use crate::{Error, Rational, Result};

/// Common parity of `|α|` over a derivative set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn of<'a>(set: impl IntoIterator<Item = &'a MultiIndex>) -> Parity {
        let mut seen = [false; 2];
        for a in set {
            seen[(a.degree() % 2) as usize] = true;
        }
        match seen {
            [true, false] => Parity::Even,
            [false, true] => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        }
    }
}

/// The space `E` with basis `(e_α)_{α∈A}` and the functionals `T̃_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientSpace {
    dim: usize,
    derivatives: Vec<MultiIndex>,
    functionals: Vec<Vec<Rational>>,
    names: Vec<String>,
    pattern: HomogeneityPattern,
    parity: Parity,
}

impl GradientSpace {
    /// Space dimension `d` of the underlying variables.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `dim E = |A|`.
    pub fn dim_e(&self) -> usize {
        self.derivatives.len()
    }

    /// The ordered set `A`.
    pub fn derivatives(&self) -> &[MultiIndex] {
        &self.derivatives
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.derivatives.binary_search(alpha).ok()
    }

    /// Coordinates of `T̃_j` over `(e_α)`, one row per operator.
    pub fn functionals(&self) -> &[Vec<Rational>] {
        &self.functionals
    }

    pub fn functionals_f64(&self) -> Vec<Vec<f64>> {
        self.functionals
            .iter()
            .map(|row| row.iter().map(rational_to_f64).collect())
            .collect()
    }

    pub fn operator_count(&self) -> usize {
        self.functionals.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn pattern(&self) -> &HomogeneityPattern {
        &self.pattern
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }
}

/// Collects `A` (lexicographic) and the coordinate vectors of the `T̃_j`.
pub fn build_gradient_space(ops: &[DifferentialOperator]) -> Result<GradientSpace> {
    let found = find_pattern(ops)?.ok_or(Error::NoCommonPattern)?;
    let derivatives: Vec<MultiIndex> = ops
        .iter()
        .flat_map(|op| op.newton_diagram().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let functionals = ops
        .iter()
        .map(|op| derivatives.iter().map(|a| op.coefficient(a)).collect())
        .collect();
    let parity = Parity::of(&derivatives);
    Ok(GradientSpace {
        dim: ops[0].dim(),
        derivatives,
        functionals,
        names: ops.iter().map(|op| String::from(op.name())).collect(),
        pattern: found.pattern,
        parity,
    })
}

/// True iff all `|α|`, `α ∈ A`, share one parity.
pub fn same_parity(space: &GradientSpace) -> bool {
    space.parity != Parity::Mixed
}

/// Exact `λ` with `T₁ = Σ_{j≥2} λ_j T_j`, or `None` if `T₁` is not in the
/// span of the others.
pub fn dependence_coefficients(ops: &[DifferentialOperator]) -> Result<Option<Vec<Rational>>> {
    if ops.len() < 2 {
        return Err(Error::EmptyInput("need at least two operators"));
    }
    let dim = ops[0].dim();
    if let Some(op) = ops.iter().find(|op| op.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
    }
    let basis: BTreeSet<&MultiIndex> = ops.iter().flat_map(|op| op.newton_diagram()).collect();
    let rows: Vec<Vec<Rational>> = basis
        .iter()
        .map(|a| ops[1..].iter().map(|op| op.coefficient(a)).collect())
        .collect();
    let rhs: Vec<Rational> = basis.iter().map(|a| ops[0].coefficient(a)).collect();
    Ok(linalg::solve(&rows, &rhs))
}

/// `e_x = Σ_α i^{|α|+|α₀|} x^α e_α`, real because the parity is uniform.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneVector {
    pub base_point: Vec<f64>,
    pub parity_ref: MultiIndex,
    pub coords: Vec<f64>,
}

impl RankOneVector {
    pub fn norm(&self) -> f64 {
        num_traits::Float::sqrt(self.coords.iter().map(|c| c * c).sum::<f64>())
    }
}

fn rank_one_sign(alpha: &MultiIndex, alpha0: &MultiIndex) -> i32 {
    // |α| + |α₀| is even here; i^{2m} = (−1)^m
    if ((alpha.degree() + alpha0.degree()) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn rank_one_vector(space: &GradientSpace, x: &[f64], alpha0: &MultiIndex) -> Result<RankOneVector> {
    if !same_parity(space) {
        return Err(Error::MixedParity);
    }
    if x.len() != space.dim {
        return Err(Error::DimensionMismatch { expected: space.dim, found: x.len() });
    }
    if space.position(alpha0).is_none() {
        return Err(Error::Config(alloc::format!("reference index {alpha0} is not in A")));
    }
    let coords = space
        .derivatives
        .iter()
        .map(|a| rank_one_sign(a, alpha0) as f64 * a.monomial(x))
        .collect();
    Ok(RankOneVector { base_point: x.to_vec(), parity_ref: alpha0.clone(), coords })
}

/// Exact rank of `samples` rank-one vectors at random small-integer points.
pub fn rank_one_span_dim(space: &GradientSpace, samples: usize, seed: u64) -> Result<usize> {
    if !same_parity(space) {
        return Err(Error::MixedParity);
    }
    let alpha0 = &space.derivatives[0];
    let mut rng = crate::seeded_rng(seed);
    let rows: Vec<Vec<Rational>> = (0..samples)
        .map(|_| {
            let x: Vec<i64> = (0..space.dim).map(|_| rng.gen_range(-4..=4)).collect();
            space
                .derivatives
                .iter()
                .map(|a| {
                    let v = a.monomial_exact(&x) * rank_one_sign(a, alpha0);
                    Rational::from_integer(v)
                })
                .collect()
        })
        .filter(|row: &Vec<Rational>| row.iter().any(|v| !v.is_zero()))
        .collect();
    Ok(linalg::rank(&rows))
}
