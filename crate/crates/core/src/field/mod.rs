//! Periodic grid fields and discrete generalized gradients.

mod grid;
mod prolong;
mod stack;
mod stencil;

pub use grid::{Grid, ScalarField, SupportBox};
pub use prolong::{prolong, prolong_axis};
pub use stack::{OperatorStack, StackBuffers};
pub use stencil::{fd_weights, spectral_weights, Stencil};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{GradientSpace, MultiIndex};
use crate::{Error, Result};

/// How `∂^α` is discretized along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeScheme {
    /// Centered differences of the given (even) order of accuracy.
    FiniteDifference { accuracy: usize },
    /// Full-width trigonometric differentiation; even sizes only.
    Spectral,
}

impl Default for DerivativeScheme {
    fn default() -> Self {
        DerivativeScheme::FiniteDifference { accuracy: 4 }
    }
}

const SPECTRAL_MARGIN: usize = 2;

/// `∇_A φ` sampled on a grid, stored one component per `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct EField {
    grid: Grid,
    derivatives: Vec<MultiIndex>,
    components: Vec<Vec<f64>>,
}

impl EField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn derivatives(&self) -> &[MultiIndex] {
        &self.derivatives
    }

    pub fn component(&self, k: usize) -> &[f64] {
        &self.components[k]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn vector_at(&self, point: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[point]).collect()
    }

    pub fn dim_e(&self) -> usize {
        self.components.len()
    }
}

/// Precomputed per-axis stencils for every `α` of a derivative set.
#[derive(Clone, Debug)]
pub struct Differentiator {
    grid: Grid,
    scheme: DerivativeScheme,
    derivatives: Vec<MultiIndex>,
    stencils: Vec<Vec<Option<Stencil>>>,
    margins: Vec<usize>,
}

impl Differentiator {
    pub fn new(derivatives: &[MultiIndex], sizes: &[usize], scheme: DerivativeScheme) -> Result<Self> {
        let dim = sizes.len();
        if derivatives.is_empty() {
            return Err(Error::EmptyInput("derivative set"));
        }
        if let Some(a) = derivatives.iter().find(|a| a.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
        }
        if let DerivativeScheme::FiniteDifference { accuracy } = scheme {
            if accuracy < 2 || accuracy % 2 == 1 {
                return Err(Error::Config(format!("accuracy must be an even number >= 2, got {accuracy}")));
            }
        }
        let mut margins = vec![0usize; dim];
        let mut stencils = Vec::with_capacity(derivatives.len());
        for a in derivatives {
            let mut per_axis = Vec::with_capacity(dim);
            for (axis, &m) in a.entries().iter().enumerate() {
                let n = sizes[axis];
                let needed = (2 * m as usize + 2).max(4);
                if n < needed {
                    return Err(Error::GridTooSmall { axis, size: n, needed });
                }
                if m == 0 {
                    per_axis.push(None);
                    continue;
                }
                let st = match scheme {
                    DerivativeScheme::FiniteDifference { accuracy } => {
                        let st = Stencil::finite_difference(m, accuracy, n);
                        if n < 2 * st.radius() + 1 {
                            return Err(Error::GridTooSmall { axis, size: n, needed: 2 * st.radius() + 1 });
                        }
                        margins[axis] = margins[axis].max(st.radius());
                        st
                    }
                    DerivativeScheme::Spectral => {
                        if n % 2 == 1 {
                            return Err(Error::Config(format!(
                                "spectral differentiation needs even grid sizes, axis {axis} has {n}"
                            )));
                        }
                        margins[axis] = margins[axis].max(SPECTRAL_MARGIN);
                        Stencil::spectral(m, n)
                    }
                };
                per_axis.push(Some(st));
            }
            stencils.push(per_axis);
        }
        for (axis, &n) in sizes.iter().enumerate() {
            let m = margins[axis].max(1);
            margins[axis] = m;
            if n < 2 * m + 2 {
                return Err(Error::GridTooSmall { axis, size: n, needed: 2 * m + 2 });
            }
        }
        Ok(Differentiator {
            grid: Grid::new(sizes)?,
            scheme,
            derivatives: derivatives.to_vec(),
            stencils,
            margins,
        })
    }

    pub fn for_space(space: &GradientSpace, sizes: &[usize], scheme: DerivativeScheme) -> Result<Self> {
        Self::new(space.derivatives(), sizes, scheme)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn scheme(&self) -> DerivativeScheme {
        self.scheme
    }

    pub fn derivatives(&self) -> &[MultiIndex] {
        &self.derivatives
    }

    /// Per-axis margin (the largest stencil radius used on that axis).
    pub fn margins(&self) -> &[usize] {
        &self.margins
    }

    /// The sub-box `[m_i, n_i − m_i)` where test functions may live.
    pub fn support(&self) -> SupportBox {
        let lo = self.margins.clone();
        let hi = self.grid.sizes().iter().zip(&self.margins).map(|(n, m)| n - m).collect();
        SupportBox::new(lo, hi)
    }

    pub fn zero_field(&self) -> ScalarField {
        ScalarField::zeros(self.grid.clone(), Some(self.support()))
    }

    /// `out = ∂^{α_k} values`.
    pub fn derivative_into(&self, k: usize, values: &[f64], out: &mut Vec<f64>, scratch: &mut Vec<f64>) {
        self.chain(k, values, out, scratch, false);
    }

    /// `out = (∂^{α_k})* values`.
    pub fn adjoint_into(&self, k: usize, values: &[f64], out: &mut Vec<f64>, scratch: &mut Vec<f64>) {
        self.chain(k, values, out, scratch, true);
    }

    fn chain(&self, k: usize, values: &[f64], out: &mut Vec<f64>, scratch: &mut Vec<f64>, adjoint: bool) {
        out.clear();
        out.extend_from_slice(values);
        scratch.resize(values.len(), 0.0);
        for (axis, st) in self.stencils[k].iter().enumerate() {
            if let Some(st) = st {
                st.apply(out, scratch, self.grid.sizes(), axis, adjoint);
                core::mem::swap(out, scratch);
            }
        }
    }

    pub fn derivative(&self, k: usize, values: &[f64]) -> Vec<f64> {
        let (mut out, mut scratch) = (Vec::new(), Vec::new());
        self.derivative_into(k, values, &mut out, &mut scratch);
        out
    }

    pub fn gradient(&self, f: &ScalarField) -> Result<EField> {
        if f.grid() != &self.grid {
            return Err(Error::DimensionMismatch { expected: self.grid.len(), found: f.grid().len() });
        }
        let components = (0..self.derivatives.len()).map(|k| self.derivative(k, f.values())).collect();
        Ok(EField { grid: self.grid.clone(), derivatives: self.derivatives.clone(), components })
    }
}

/// `∇_A f` with the default scheme.
pub fn apply_generalized_gradient(space: &GradientSpace, f: &ScalarField) -> Result<EField> {
    Differentiator::for_space(space, f.grid().sizes(), DerivativeScheme::default())?.gradient(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_gradient_space, parse_operator};

    fn ex_space() -> GradientSpace {
        let ops: Vec<_> = ["d1*d2", "d1^2", "d2^2"].iter().map(|s| parse_operator(s, 2).unwrap()).collect();
        build_gradient_space(&ops).unwrap()
    }

    #[test]
    fn zero_field_has_zero_gradient() {
        let s = ex_space();
        let d = Differentiator::for_space(&s, &[16, 16], DerivativeScheme::default()).unwrap();
        let g = d.gradient(&d.zero_field()).unwrap();
        assert!(g.components().iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn polynomial_exactness() {
        // f = x1^2 x2 on the support; ∂1∂2 f = 2 x1 away from the support edge
        let s = ex_space();
        let n = 32;
        let d = Differentiator::for_space(&s, &[n, n], DerivativeScheme::default()).unwrap();
        let mut f = d.zero_field();
        let grid = f.grid().clone();
        for p in 0..grid.len() {
            let x = grid.point(p);
            let (i, j) = (grid.index(p, 0), grid.index(p, 1));
            if (2..n - 2).contains(&i) && (2..n - 2).contains(&j) {
                f.values_mut()[p] = x[0] * x[0] * x[1];
            }
        }
        let k = s.position(&MultiIndex::from([1, 1])).unwrap();
        let g = d.derivative(k, f.values());
        for p in 0..grid.len() {
            let (i, j) = (grid.index(p, 0), grid.index(p, 1));
            if (4..n - 4).contains(&i) && (4..n - 4).contains(&j) {
                assert!((g[p] - 2.0 * grid.point(p)[0]).abs() < 1e-9, "{} vs {}", g[p], 2.0 * grid.point(p)[0]);
            }
        }
    }

    #[test]
    fn spectral_is_exact_on_trig() {
        let n = 16;
        let d = Differentiator::new(&[MultiIndex::from([2])], &[n], DerivativeScheme::Spectral).unwrap();
        let tau = 2.0 * core::f64::consts::PI;
        let f: Vec<f64> = (0..n).map(|i| (tau * 3.0 * i as f64 / n as f64).sin()).collect();
        let g = d.derivative(0, &f);
        for i in 0..n {
            assert!((g[i] + tau * tau * 9.0 * f[i]).abs() < 1e-9);
        }
        let odd = Differentiator::new(&[MultiIndex::from([1])], &[15], DerivativeScheme::Spectral);
        assert!(matches!(odd, Err(Error::Config(_))));
    }

    #[test]
    fn grid_too_small() {
        let r = Differentiator::new(&[MultiIndex::from([4, 0])], &[8, 8], DerivativeScheme::default());
        assert!(matches!(r, Err(Error::GridTooSmall { axis: 0, .. })));
        let r = Differentiator::new(&[MultiIndex::from([1, 0])], &[8, 8], DerivativeScheme::FiniteDifference { accuracy: 3 });
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn adjoint_identity() {
        let s = ex_space();
        let d = Differentiator::for_space(&s, &[12, 10], DerivativeScheme::default()).unwrap();
        let u: Vec<f64> = (0..120).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let v: Vec<f64> = (0..120).map(|i| ((i * 53 % 7) as f64 - 3.0) / 2.0).collect();
        for k in 0..3 {
            let du = d.derivative(k, &u);
            let (mut dv, mut sc) = (Vec::new(), Vec::new());
            d.adjoint_into(k, &v, &mut dv, &mut sc);
            let lhs: f64 = du.iter().zip(&v).map(|(a, b)| a * b).sum();
            let rhs: f64 = u.iter().zip(&dv).map(|(a, b)| a * b).sum();
            assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
        }
    }
}
