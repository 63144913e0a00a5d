use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use super::MultiIndex;
use crate::{Error, Rational, Result};

/// Constant-coefficient scalar differential operator `Σ c_α ∂^α`.
///
/// Coefficients are exact rationals; zero coefficients are never stored, so
/// the key set of `terms` is the Newton diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialOperator {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
    name: String,
}

impl DifferentialOperator {
    /// Builds an operator from `(α, c)` pairs, merging repeated monomials.
    pub fn from_terms(
        dim: usize,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: alpha.dim() });
            }
            *map.entry(alpha).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(Error::EmptyOperator);
        }
        Ok(DifferentialOperator { dim, terms: map, name: name.into() })
    }

    /// `∂^α` with unit coefficient.
    pub fn monomial(alpha: MultiIndex, name: impl Into<String>) -> Self {
        let dim = alpha.dim();
        let mut terms = BTreeMap::new();
        terms.insert(alpha, Rational::one());
        DifferentialOperator { dim, terms, name: name.into() }
    }

    /// `Σ λ_j T_j`; fails with [`Error::EmptyOperator`] if everything cancels.
    pub fn linear_combination(
        name: impl Into<String>,
        parts: &[(Rational, &DifferentialOperator)],
    ) -> Result<Self> {
        let dim = parts.first().ok_or(Error::EmptyInput("linear combination"))?.1.dim;
        let terms = parts.iter().flat_map(|(lambda, op)| {
            op.terms.iter().map(move |(a, c)| (a.clone(), lambda * c))
        });
        Self::from_terms(dim, name, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn newton_diagram(&self) -> impl Iterator<Item = &MultiIndex> + '_ {
        self.terms.keys()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficients as `f64`, in diagram order.
    pub fn float_terms(&self) -> Vec<(MultiIndex, f64)> {
        self.terms
            .iter()
            .map(|(a, c)| (a.clone(), rational_to_f64(c)))
            .collect()
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Prints in the operator grammar, so the output parses back to `self`.
impl fmt::Display for DifferentialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (alpha, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write!(f, "d^{alpha}")?;
        }
        Ok(())
    }
}
