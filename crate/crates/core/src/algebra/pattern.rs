use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{linalg, DifferentialOperator, MultiIndex};
use crate::{Error, Rational, Result};

/// Affine hyperplane `Λ = {α : ⟨α, γ⟩ = k}` with positive integer weights.
///
/// Always stored primitive: `gcd(γ₁, …, γ_d, k) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogeneityPattern {
    gamma: Vec<u64>,
    level: u64,
}

impl HomogeneityPattern {
    /// Normalizes `(γ, k)` by its gcd. Every weight and the level must be
    /// positive.
    pub fn new(gamma: Vec<u64>, level: u64) -> Result<Self> {
        if gamma.is_empty() || level == 0 || gamma.contains(&0) {
            return Err(Error::Config(alloc::format!(
                "pattern weights and level must be positive, got {gamma:?}; {level}"
            )));
        }
        let g = gamma.iter().fold(level, |acc, &x| acc.gcd(&x));
        Ok(HomogeneityPattern { gamma: gamma.iter().map(|x| x / g).collect(), level: level / g })
    }

    /// `γ = (1, …, 1)` at level `k`.
    pub fn isotropic(dim: usize, level: u64) -> Self {
        HomogeneityPattern { gamma: alloc::vec![1; dim], level }
    }

    pub fn gamma(&self) -> &[u64] {
        &self.gamma
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        alpha.dim() == self.dim() && alpha.weighted_degree(&self.gamma) == self.level
    }
}

impl fmt::Display for HomogeneityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, g) in self.gamma.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ";{})", self.level)
    }
}

/// Outcome of [`find_pattern`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSearch {
    pub pattern: HomogeneityPattern,
    /// False when the diagram points admit a family of patterns; `pattern` is
    /// then the lexicographically smallest one.
    pub unique: bool,
    /// Primitive integer basis `(γ, k)` of all solutions of `⟨α,γ⟩ = k`,
    /// without the positivity requirement.
    pub generators: Vec<Vec<BigInt>>,
}

/// Search box for the lexicographic minimum when the pattern is not unique.
const LEX_SEARCH_BOUND: u64 = 64;

/// Finds a positive pattern `(γ, k)` containing every Newton-diagram point of
/// every operator, or `None` if there is none.
pub fn find_pattern(ops: &[DifferentialOperator]) -> Result<Option<PatternSearch>> {
    let first = ops.first().ok_or(Error::EmptyInput("operator list"))?;
    let dim = first.dim();
    if let Some(op) = ops.iter().find(|op| op.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
    }
    let points: BTreeSet<&MultiIndex> = ops.iter().flat_map(|op| op.newton_diagram()).collect();
    if points.is_empty() {
        return Err(Error::EmptyInput("Newton diagram"));
    }
    // unknowns (γ₁ … γ_d, k); one equation ⟨α,γ⟩ − k = 0 per diagram point
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|a| {
            let mut r: Vec<Rational> = a.entries().iter().map(|&x| int(x as i64)).collect();
            r.push(int(-1));
            r
        })
        .collect();
    let basis = linalg::nullspace(&rows, dim + 1);
    let generators: Vec<Vec<BigInt>> = basis.iter().map(|v| primitive(v)).collect();
    match generators.len() {
        0 => Ok(None),
        1 => {
            let mut v = generators[0].clone();
            if v.iter().all(|x| !x.is_positive()) {
                v.iter_mut().for_each(|x| *x = -x.clone());
            }
            if v.iter().any(|x| !x.is_positive()) {
                return Ok(None);
            }
            let pattern = to_pattern(&v)?;
            Ok(Some(PatternSearch { pattern, unique: true, generators }))
        }
        _ => {
            let mut prefix = Vec::with_capacity(dim);
            Ok(lex_search(&rows, dim, &mut prefix).map(|v| PatternSearch {
                pattern: to_pattern(&v).expect("search only yields positive solutions"),
                unique: false,
                generators,
            }))
        }
    }
}

/// Depth-first search over `γ` in lexicographic order. Once the prefix pins
/// down the remaining unknowns, the candidate is read off directly.
fn lex_search(rows: &[Vec<Rational>], dim: usize, prefix: &mut Vec<u64>) -> Option<Vec<BigInt>> {
    let fixed = prefix.len();
    // remaining unknowns: γ_{fixed..dim}, k
    let free = dim + 1 - fixed;
    let reduced: Vec<Vec<Rational>> = rows.iter().map(|r| r[fixed..].to_vec()).collect();
    let rhs: Vec<Rational> = rows
        .iter()
        .map(|r| -r[..fixed].iter().zip(prefix.iter()).map(|(a, &g)| a * int(g as i64)).sum::<Rational>())
        .collect();
    let rest = linalg::solve(&reduced, &rhs)?;
    if linalg::rank(&reduced) == free {
        let mut v: Vec<BigInt> = prefix.iter().map(|&g| BigInt::from(g)).collect();
        for q in rest {
            if !q.is_integer() || !q.is_positive() {
                return None;
            }
            v.push(q.to_integer());
        }
        return Some(v);
    }
    for g in 1..=LEX_SEARCH_BOUND {
        prefix.push(g);
        let hit = lex_search(rows, dim, prefix);
        prefix.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Scales a rational vector to coprime integers.
fn primitive(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| (q * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn to_pattern(v: &[BigInt]) -> Result<HomogeneityPattern> {
    let (k, gamma) = v.split_last().ok_or(Error::EmptyInput("pattern"))?;
    let conv = |x: &BigInt| x.to_u64().ok_or(Error::Config(alloc::format!("pattern entry {x} overflows")));
    HomogeneityPattern::new(gamma.iter().map(conv).collect::<Result<_>>()?, conv(k)?)
}

/// True iff every diagram point of `op` lies on the pattern plane.
pub fn check_homogeneous(op: &DifferentialOperator, pattern: &HomogeneityPattern) -> bool {
    op.dim() == pattern.dim() && op.newton_diagram().all(|a| pattern.contains(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_operator;
    use alloc::vec;

    fn ops(lines: &[&str], dim: usize) -> Vec<DifferentialOperator> {
        lines.iter().map(|l| parse_operator(l, dim).unwrap()).collect()
    }

    #[test]
    fn three_variable_pattern() {
        let family = ops(&["d^(2,0,1) - d^(0,3,1)", "d^(4,0,0)", "d^(0,6,0)", "d^(0,0,2)"], 3);
        let found = find_pattern(&family).unwrap().unwrap();
        assert_eq!(found.pattern.gamma(), &[3, 2, 6]);
        assert_eq!(found.pattern.level(), 12);
        assert!(found.unique);
        for op in &family {
            assert!(check_homogeneous(op, &found.pattern));
        }
    }

    #[test]
    fn isotropic_first_order() {
        for d in 1..5 {
            let family: Vec<_> = (0..d)
                .map(|i| DifferentialOperator::monomial(MultiIndex::unit(d, i), "g"))
                .collect();
            let found = find_pattern(&family).unwrap().unwrap();
            assert_eq!(found.pattern, HomogeneityPattern::isotropic(d, 1));
        }
    }

    #[test]
    fn no_pattern_for_mixed_orders() {
        assert_eq!(find_pattern(&ops(&["d1", "d1^2"], 1)).unwrap(), None);
        assert_eq!(find_pattern(&ops(&["d1", "d1^2"], 2)).unwrap(), None);
    }

    #[test]
    fn family_of_patterns_is_flagged() {
        // 2γ₁ + γ₂ = k alone: smallest is γ = (1,1), k = 3
        let found = find_pattern(&ops(&["d1^2*d2"], 2)).unwrap().unwrap();
        assert!(!found.unique);
        assert_eq!(found.pattern.gamma(), &[1, 1]);
        assert_eq!(found.pattern.level(), 3);
        assert_eq!(found.generators.len(), 2);
    }

    #[test]
    fn anisotropic_weights() {
        let found = find_pattern(&ops(&["d1^2*d2", "d1^4", "d2^2"], 2)).unwrap().unwrap();
        assert_eq!(found.pattern.gamma(), &[1, 2]);
        assert_eq!(found.pattern.level(), 4);
    }

    #[test]
    fn homogeneity_checks() {
        let p = HomogeneityPattern::new(vec![1, 1], 3).unwrap();
        assert!(check_homogeneous(&parse_operator("d1^2*d2", 2).unwrap(), &p));
        for k in 1..4 {
            let p = HomogeneityPattern::new(vec![1], k).unwrap();
            assert!(!check_homogeneous(&parse_operator("d1 + d1^2", 1).unwrap(), &p));
        }
        let p = HomogeneityPattern::new(vec![6, 4, 12], 24).unwrap();
        assert_eq!(p.gamma(), &[3, 2, 6]);
        assert!(check_homogeneous(&parse_operator("d^(2,0,1) - d^(0,3,1)", 3).unwrap(), &p));
        assert!(HomogeneityPattern::new(vec![0, 1], 1).is_err());
    }
}
