use alloc::vec;
use alloc::vec::Vec;

use super::{DerivativeScheme, Differentiator};
use crate::algebra::GradientSpace;
use crate::Result;

/// The functionals `T̃_j` composed with a discrete generalized gradient:
/// `f ↦ (T̃_j(e + ∇_A f)(x))_j`, with its adjoint.
#[derive(Clone, Debug)]
pub struct OperatorStack {
    diff: Differentiator,
    coeffs: Vec<Vec<f64>>,
    mask: Vec<f64>,
}

/// Scratch buffers for one evaluation thread.
#[derive(Clone, Debug, Default)]
pub struct StackBuffers {
    derivs: Vec<Vec<f64>>,
    /// `T_j f` after [`OperatorStack::forward`]; overwrite with the weights
    /// `∂L/∂(T_j f)` before calling [`OperatorStack::backward`].
    pub t: Vec<Vec<f64>>,
    tmp: Vec<f64>,
    acc: Vec<f64>,
    scratch: Vec<f64>,
}

impl OperatorStack {
    pub fn new(space: &GradientSpace, sizes: &[usize], scheme: DerivativeScheme) -> Result<Self> {
        let diff = Differentiator::for_space(space, sizes, scheme)?;
        let mask = diff.support().mask(diff.grid());
        Ok(OperatorStack { diff, coeffs: space.functionals_f64(), mask })
    }

    pub fn differentiator(&self) -> &Differentiator {
        &self.diff
    }

    pub fn mask(&self) -> &[f64] {
        &self.mask
    }

    pub fn operator_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn buffers(&self) -> StackBuffers {
        let n = self.len();
        StackBuffers {
            derivs: vec![vec![0.0; n]; self.diff.derivatives().len()],
            t: vec![vec![0.0; n]; self.coeffs.len()],
            tmp: vec![0.0; n],
            acc: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    /// Fills `buf.t[j] = T̃_j(e + ∇_A x)`; `e = None` means `e = 0`.
    pub fn forward(&self, x: &[f64], e: Option<&[f64]>, buf: &mut StackBuffers) {
        for k in 0..self.diff.derivatives().len() {
            self.diff.derivative_into(k, x, &mut buf.derivs[k], &mut buf.scratch);
            if let Some(e) = e {
                let ek = e[k];
                buf.derivs[k].iter_mut().for_each(|v| *v += ek);
            }
        }
        for (j, row) in self.coeffs.iter().enumerate() {
            let t = &mut buf.t[j];
            t.iter_mut().for_each(|v| *v = 0.0);
            for (k, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    for (tv, dv) in t.iter_mut().zip(&buf.derivs[k]) {
                        *tv += c * dv;
                    }
                }
            }
        }
    }

    /// `grad = mask · Σ_j (T̃_j ∘ ∇_A)* buf.t[j]`.
    pub fn backward(&self, buf: &mut StackBuffers, grad: &mut [f64]) {
        grad.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..self.diff.derivatives().len() {
            let mut any = false;
            buf.tmp.iter_mut().for_each(|v| *v = 0.0);
            for (j, row) in self.coeffs.iter().enumerate() {
                let c = row[k];
                if c != 0.0 {
                    any = true;
                    for (tv, wv) in buf.tmp.iter_mut().zip(&buf.t[j]) {
                        *tv += c * wv;
                    }
                }
            }
            if !any {
                continue;
            }
            self.diff.adjoint_into(k, &buf.tmp, &mut buf.acc, &mut buf.scratch);
            for (g, a) in grad.iter_mut().zip(&buf.acc) {
                *g += a;
            }
        }
        for (g, m) in grad.iter_mut().zip(&self.mask) {
            *g *= m;
        }
    }
}
