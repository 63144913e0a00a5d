use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

/// Exponent vector `α ∈ ℤ≥0ᵈ` of a monomial `∂^α`.
///
/// Ordering is lexicographic on the entries, which fixes the coordinate
/// order of the space `E`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: impl Into<Vec<u32>>) -> Self {
        MultiIndex(entries.into())
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(alloc::vec![0; dim])
    }

    /// `e_i`, i.e. the first-order derivative `∂_i` (zero-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = alloc::vec![0; dim];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `⟨α, γ⟩`.
    pub fn weighted_degree(&self, weights: &[u64]) -> u64 {
        self.0.iter().zip(weights).map(|(&a, &w)| a as u64 * w).sum()
    }

    /// `x^α` in floating point.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| num_traits::Float::powi(xi, a as i32))
            .product()
    }

    /// `x^α` for an integer point, exactly.
    pub fn monomial_exact(&self, x: &[i64]) -> BigInt {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| num_traits::pow(BigInt::from(xi), a as usize))
            .product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(v: &[u32]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn degree_is_entry_sum() {
        let a = MultiIndex::from([2, 0, 1]);
        assert_eq!(a.degree(), 3);
        assert_eq!(a.weighted_degree(&[3, 2, 6]), 12);
        assert_eq!(a.to_string(), "(2,0,1)");
    }

    #[test]
    fn lexicographic_order() {
        let mut v = alloc::vec![
            MultiIndex::from([2, 0]),
            MultiIndex::from([0, 2]),
            MultiIndex::from([1, 1]),
        ];
        v.sort();
        assert_eq!(v[0], MultiIndex::from([0, 2]));
        assert_eq!(v[2], MultiIndex::from([2, 0]));
    }

    #[test]
    fn monomials() {
        let a = MultiIndex::from([2, 1]);
        assert_eq!(a.monomial(&[3.0, -2.0]), -18.0);
        assert_eq!(a.monomial_exact(&[3, -2]), BigInt::from(-18));
        assert_eq!(MultiIndex::zeros(2).monomial(&[0.0, 0.0]), 1.0);
    }
}
