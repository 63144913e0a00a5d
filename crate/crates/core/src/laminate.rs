//! Oscillating test functions whose generalized gradient is spread along
//! one rank-one direction.

use alloc::format;
use alloc::vec::Vec;

// float methods without std
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::algebra::{rank_one_vector, GradientSpace, HomogeneityPattern, MultiIndex};
use crate::field::{DerivativeScheme, Differentiator, Grid, ScalarField, SupportBox};
use crate::stats::{arccos_law_cdf, ks_statistic};
use crate::{Error, Result};

const TAU: f64 = 2.0 * core::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct LaminateSpec {
    pub x: Vec<f64>,
    pub alpha0: MultiIndex,
    /// Frequency scale.
    pub t: u64,
    /// Hat margin; `Φ = 1` on `[2δ′, 1−2δ′]^d` and vanishes off `[δ′, 1−δ′]^d`.
    pub delta_prime: f64,
    pub pattern: HomogeneityPattern,
}

impl LaminateSpec {
    /// Parameters for a target bad-set measure `δ`: `δ′ = δ/10` and `t = ⌈15/δ′⌉`,
    /// so the hat ramps stay well resolved against the oscillation.
    pub fn for_delta(x: Vec<f64>, alpha0: MultiIndex, pattern: HomogeneityPattern, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
        }
        let delta_prime = delta / 10.0;
        let t = (15.0 / delta_prime).ceil() as u64;
        let spec = LaminateSpec { x, alpha0, t, delta_prime, pattern };
        spec.validate()?;
        Ok(spec)
    }

    /// Grid with at least `points_per_period` samples per period on each
    /// axis, rounded up to a multiple of 256.
    pub fn suggested_sizes(&self, points_per_period: f64) -> Vec<usize> {
        self.frequencies()
            .iter()
            .map(|w| {
                let n = (w.abs() / TAU * points_per_period).ceil().max(16.0) as usize;
                n.div_ceil(256) * 256
            })
            .collect()
    }

    /// Angular frequency `t^{γ_j} x_j` along each axis.
    pub fn frequencies(&self) -> Vec<f64> {
        self.pattern
            .gamma()
            .iter()
            .zip(&self.x)
            .map(|(&g, &x)| (self.t as f64).powi(g as i32) * x)
            .collect()
    }

    /// Number of full periods fitting in `[2δ′, 1−2δ′]` per axis
    /// (`None` for axes with `x_j = 0`).
    pub fn periods(&self) -> Vec<Option<u64>> {
        let flat = 1.0 - 4.0 * self.delta_prime;
        self.frequencies()
            .iter()
            .map(|&w| if w == 0.0 { None } else { Some((flat * w.abs() / TAU).floor() as u64) })
            .collect()
    }

    /// Exact measure of the union of full period boxes.
    pub fn good_measure(&self) -> f64 {
        let flat = 1.0 - 4.0 * self.delta_prime;
        self.periods()
            .iter()
            .zip(self.frequencies())
            .map(|(p, w)| match p {
                None => flat,
                Some(c) => *c as f64 * TAU / w.abs(),
            })
            .product()
    }

    fn validate(&self) -> Result<()> {
        let d = self.pattern.dim();
        if self.x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.x.len() });
        }
        if !(self.delta_prime > 0.0 && self.delta_prime < 0.25) {
            return Err(Error::Config(format!("delta_prime must lie in (0, 1/4), got {}", self.delta_prime)));
        }
        if self.t == 0 {
            return Err(Error::Config("t must be positive".into()));
        }
        if let Some(axis) = self.periods().iter().position(|p| *p == Some(0)) {
            return Err(Error::LaminateTooCoarse { axis });
        }
        Ok(())
    }
}

/// `0` below 0, `1` above 1, smooth in between.
fn smooth_step(u: f64) -> f64 {
    let psi = |v: f64| if v > 0.0 { (-1.0 / v).exp() } else { 0.0 };
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = psi(u);
        a / (a + psi(1.0 - u))
    }
}

/// One-dimensional factor of `Φ`.
pub fn hat(s: f64, delta_prime: f64) -> f64 {
    smooth_step((s - delta_prime) / delta_prime) * smooth_step((1.0 - delta_prime - s) / delta_prime)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Laminate {
    pub field: ScalarField,
    /// Grid points inside the union of full period boxes.
    pub good_set: Vec<bool>,
    /// Grid points where `Φ = 1`.
    pub flat: Vec<bool>,
}

impl Laminate {
    pub fn good_fraction(&self) -> f64 {
        self.good_set.iter().filter(|b| **b).count() as f64 / self.good_set.len() as f64
    }
}

/// Samples `t^{−k} cos(Σ t^{γ_j} x_j ξ_j) Φ(ξ)` on a grid.
pub fn laminate(spec: &LaminateSpec, sizes: &[usize]) -> Result<Laminate> {
    spec.validate()?;
    let grid = Grid::new(sizes)?;
    if sizes.len() != spec.x.len() {
        return Err(Error::DimensionMismatch { expected: spec.x.len(), found: sizes.len() });
    }
    let omega = spec.frequencies();
    let amp = (spec.t as f64).powi(-(spec.pattern.level() as i32));
    let dp = spec.delta_prime;
    let ends: Vec<f64> = spec
        .periods()
        .iter()
        .zip(&omega)
        .map(|(p, w)| match p {
            None => 1.0 - 2.0 * dp,
            Some(c) => 2.0 * dp + *c as f64 * TAU / w.abs(),
        })
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    let mut good_set = Vec::with_capacity(grid.len());
    let mut flat = Vec::with_capacity(grid.len());
    for p in 0..grid.len() {
        let xi = grid.point(p);
        let phase: f64 = xi.iter().zip(&omega).map(|(a, w)| a * w).sum();
        let phi: f64 = xi.iter().map(|s| hat(*s, dp)).product();
        values.push(amp * phase.cos() * phi);
        good_set.push(xi.iter().zip(&ends).all(|(s, e)| *s >= 2.0 * dp && s < e));
        flat.push(xi.iter().all(|s| *s >= 2.0 * dp && *s <= 1.0 - 2.0 * dp));
    }
    let lo = sizes.iter().map(|&n| ((dp * n as f64).floor() as usize).min(n)).collect();
    let hi = sizes.iter().map(|&n| (((1.0 - dp) * n as f64).ceil() as usize + 1).min(n)).collect();
    let field = ScalarField::from_values(grid, values, Some(SupportBox::new(lo, hi)))?;
    Ok(Laminate { field, good_set, flat })
}

/// Measured properties of a laminate's discrete generalized gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct LaminateReport {
    pub good_fraction: f64,
    pub good_measure: f64,
    pub sup_gradient: f64,
    pub ex_norm: f64,
    /// KS distance of `⟨∇l, e_x⟩/‖e_x‖²` on the good set to `1 − arccos(s)/π`.
    pub ks: f64,
    /// Largest deviation of `∂^α l` from its leading term on the flat region.
    pub identity_residual: f64,
    pub periods: Vec<Option<u64>>,
}

pub fn laminate_report(space: &GradientSpace, spec: &LaminateSpec, sizes: &[usize], scheme: DerivativeScheme) -> Result<LaminateReport> {
    let lam = laminate(spec, sizes)?;
    let ex = rank_one_vector(space, &spec.x, &spec.alpha0)?;
    let ex_norm = ex.norm();
    let ex2 = ex_norm * ex_norm;
    let diff = Differentiator::for_space(space, sizes, scheme)?;
    let grad = diff.gradient(&lam.field)?;
    let grid = lam.field.grid();
    let omega = spec.frequencies();
    let mut sup: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let mut projections = Vec::new();
    for p in 0..grid.len() {
        let v = grad.vector_at(p);
        sup = sup.max(v.iter().map(|a| a * a).sum::<f64>().sqrt());
        if lam.good_set[p] && ex2 > 0.0 {
            projections.push(v.iter().zip(&ex.coords).map(|(a, b)| a * b).sum::<f64>() / ex2);
        }
        if lam.flat[p] {
            let phase: f64 = grid.point(p).iter().zip(&omega).map(|(a, w)| a * w).sum();
            for (k, alpha) in space.derivatives().iter().enumerate() {
                let m = alpha.degree();
                let lead = if m % 2 == 0 {
                    let s = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    s * phase.cos()
                } else {
                    let s = if ((m - 1) / 2) % 2 == 0 { -1.0 } else { 1.0 };
                    s * phase.sin()
                };
                residual = residual.max((v[k] - lead * alpha.monomial(&spec.x)).abs());
            }
        }
    }
    let ks = if projections.is_empty() { 1.0 } else { ks_statistic(&projections, arccos_law_cdf) };
    Ok(LaminateReport {
        good_fraction: lam.good_fraction(),
        good_measure: spec.good_measure(),
        sup_gradient: sup,
        ex_norm,
        ks,
        identity_residual: residual,
        periods: spec.periods(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_shape() {
        let d = 0.1;
        assert_eq!(hat(0.05, d), 0.0);
        assert_eq!(hat(0.95, d), 0.0);
        assert_eq!(hat(0.2, d), 1.0);
        assert_eq!(hat(0.5, d), 1.0);
        assert_eq!(hat(0.8, d), 1.0);
        let mid = hat(0.15, d);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn periods_and_measure() {
        let spec = LaminateSpec {
            x: alloc::vec![1.0, 0.0],
            alpha0: MultiIndex::from([1, 1]),
            t: 20,
            delta_prime: 0.05,
            pattern: HomogeneityPattern::isotropic(2, 2),
        };
        // flat region has length 0.8, period 2π/20
        assert_eq!(spec.periods(), alloc::vec![Some(2), None]);
        let expect = 2.0 * TAU / 20.0 * 0.8;
        assert!((spec.good_measure() - expect).abs() < 1e-12);
        let coarse = LaminateSpec { t: 5, ..spec };
        assert!(matches!(laminate(&coarse, &[16, 16]), Err(Error::LaminateTooCoarse { axis: 0 })));
    }

    #[test]
    fn delta_parameters() {
        let pattern = HomogeneityPattern::isotropic(2, 2);
        let spec = LaminateSpec::for_delta(alloc::vec![1.0, 1.0], MultiIndex::from([1, 1]), pattern, 0.1).unwrap();
        assert_eq!(spec.t, 1500);
        assert!((spec.delta_prime - 0.01).abs() < 1e-15);
        assert_eq!(spec.suggested_sizes(12.0), alloc::vec![3072, 3072]);
        assert!(spec.good_measure() >= 0.9);
    }

    #[test]
    fn small_report() {
        let ops = ["d1^2", "d1*d2", "d2^2"].map(|s| crate::algebra::parse_operator(s, 2).unwrap());
        let space = crate::algebra::build_gradient_space(&ops).unwrap();
        let spec = LaminateSpec {
            x: alloc::vec![1.0, 1.0],
            alpha0: MultiIndex::from([1, 1]),
            t: 100,
            delta_prime: 0.1,
            pattern: HomogeneityPattern::isotropic(2, 2),
        };
        let r = laminate_report(&space, &spec, &[256, 256], DerivativeScheme::default()).unwrap();
        assert!(r.identity_residual < 1e-2, "{}", r.identity_residual);
        assert!((r.good_fraction - r.good_measure).abs() < 0.05);
    }
}
