use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Sizes of a periodic grid on `[0,1)^d`, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    sizes: Vec<usize>,
}

impl Grid {
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::EmptyInput("grid sizes"));
        }
        for (axis, &n) in sizes.iter().enumerate() {
            if n < 4 {
                return Err(Error::GridTooSmall { axis, size: n, needed: 4 });
            }
        }
        Ok(Grid { sizes: sizes.to_vec() })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the point along `axis`.
    pub fn index(&self, point: usize, axis: usize) -> usize {
        let inner: usize = self.sizes[axis + 1..].iter().product();
        (point / inner) % self.sizes[axis]
    }

    pub fn multi_index(&self, point: usize) -> Vec<usize> {
        let mut rest = point;
        let mut out = vec![0; self.sizes.len()];
        for axis in (0..self.sizes.len()).rev() {
            out[axis] = rest % self.sizes[axis];
            rest /= self.sizes[axis];
        }
        out
    }

    /// Coordinates `i_j / n_j`.
    pub fn point(&self, point: usize) -> Vec<f64> {
        self.multi_index(point).iter().zip(&self.sizes).map(|(&i, &n)| i as f64 / n as f64).collect()
    }
}

/// Half-open index box `[lo_j, hi_j)` per axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportBox {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl SupportBox {
    pub fn new(lo: Vec<usize>, hi: Vec<usize>) -> Self {
        SupportBox { lo, hi }
    }

    pub fn lo(&self) -> &[usize] {
        &self.lo
    }

    pub fn hi(&self) -> &[usize] {
        &self.hi
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        idx.iter().zip(self.lo.iter().zip(&self.hi)).all(|(i, (lo, hi))| lo <= i && i < hi)
    }

    /// 0/1 indicator over the whole grid.
    pub fn mask(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.len()).map(|p| if self.contains(&grid.multi_index(p)) { 1.0 } else { 0.0 }).collect()
    }
}

/// Samples of a function on a periodic grid, optionally forced to vanish
/// outside a support box.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    support: Option<SupportBox>,
}

impl ScalarField {
    pub fn zeros(grid: Grid, support: Option<SupportBox>) -> Self {
        let values = vec![0.0; grid.len()];
        ScalarField { grid, values, support }
    }

    /// Wraps samples; entries outside the support are zeroed.
    pub fn from_values(grid: Grid, values: Vec<f64>, support: Option<SupportBox>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        let mut f = ScalarField { grid, values, support };
        f.enforce_support();
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn support(&self) -> Option<&SupportBox> {
        self.support.as_ref()
    }

    pub fn enforce_support(&mut self) {
        if let Some(b) = &self.support {
            for p in 0..self.grid.len() {
                if !b.contains(&self.grid.multi_index(p)) {
                    self.values[p] = 0.0;
                }
            }
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * lambda).collect(),
            support: self.support.clone(),
        }
    }
}
